from setuptools import setup, find_packages
import os
from typing import List

package_name = 'dwitness'

def get_version() -> str:
    filedir = os.path.join(os.path.dirname(__file__), package_name, '__init__.py')
    with open(filedir, 'r') as f:
        text = f.read()
    import re
    re_version = re.compile(r'__version__[\s]*=[\s]*["\'](\d{1,3}\.\d{1,3}\..+)["\']')
    version = re_version.findall(text)[0]
    return version

def parse_requirements(filename: str) -> List[str]:
    with open(filename, 'r') as f:
        requirements = f.read().splitlines()
    return list(filter(lambda x: (x.strip() != '') and (not x.startswith('#')), requirements))

requirements = parse_requirements(os.path.join(os.path.dirname(__file__), 'requirements.txt'))

setup(
    name=package_name,
    version=get_version(),
    description='Disorder-averaged thermodynamic entanglement witness of the XX spin chain.',
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    python_requires='>=3.9',
    install_requires=requirements,
    extras_require={
        'test': ['pytest>=7.0']
    },
    entry_points = {
        'console_scripts': [f'{package_name}={package_name}.cli:cli'],
    }
)
