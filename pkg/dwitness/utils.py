import os
import json
from typing import Union, List, Dict, Any, Optional, Callable, Sequence

### Helper functions
def env_name() -> str:
    """Get the current python environment name.

    Returns:
        str: Current python environment name.
    """
    import sys
    base = os.path.basename(sys.prefix)
    if base.lower() in ['anaconda3', 'miniconda3']:
        return 'base'
    elif 'python3' in base.lower():
        return 'base'
    else:
        return base

def read_json(file_dir: str) -> Union[Dict[str, Any], List[Dict[str, Any]]]:
    """Read the json file provided as a dictionary or a list of dictionaries.

    Args:
        file_dir (str): Path of the json file.

    Returns:
        Union[Dict[str, Any], List[Dict[str, Any]]]: Content of the json file as a dictionary or a list of dictionaries.
    """
    with open(file_dir, 'r') as f:
        content = json.load(f)
    return content

def atomic_write_text(text: str, file_dir: str) -> str:
    """Write text to a file through a temporary sibling and an atomic rename, so that the target never holds a partial write.

    Args:
        text (str): Content to write.
        file_dir (str): Path (with filename) of the target file.

    Returns:
        str: Absolute path of the written file.
    """
    import tempfile
    file_dir = os.path.abspath(file_dir)
    parent = os.path.dirname(file_dir)
    os.makedirs(parent, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix='.' + os.path.basename(file_dir) + '.', suffix='.tmp', dir=parent)
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(tmp, file_dir)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return file_dir

def save_json(content: Union[Dict[str, Any], List[Dict[str, Any]]], file_dir: str) -> None:
    """Save the given dictionary or list of dictionaries as a json file.

    Args:
        content (Union[Dict[str, Any], List[Dict[str, Any]]]): Dictionary or list of dictionaries to save.
        file_dir (str): Path (with filename) to save the content.
    """
    atomic_write_text(json.dumps(content, indent=4) + '\n', file_dir)

def file_digest(file_dir: str) -> str:
    """SHA-256 digest of a file's bytes.

    Args:
        file_dir (str): Path of the file.

    Returns:
        str: Hexadecimal digest.
    """
    import hashlib
    sha = hashlib.sha256()
    with open(file_dir, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            sha.update(chunk)
    return sha.hexdigest()

def utc_timestamp() -> str:
    """Current UTC time as an ISO-8601 string.

    Returns:
        str: Timestamp such as '2024-01-01T00:00:00+00:00'.
    """
    from datetime import datetime, timezone
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()

### Package configuration

## Defaults
package_fullname = 'DisorderWitness'
package_name = 'dwitness'

user_home = os.path.expanduser('~')

default_settings = dict(
    t_min = 5e-3,
    tol_eps = 1e-6,
    min_grid = 256,
    grid_factor = 16,
    delta_max = 1e-4,
    threads = None,
    output_home = os.getcwd()
)

def get_config_dir() -> str:
    """Get the configuration file path of dwitness.

    Returns:
        str: configuration file path.
    """
    config_dir = os.path.join(user_home, '.config', package_name, env_name())
    return os.path.join(config_dir, 'config.json')

def get_config() -> Dict[str, Any]:
    """Get the configuration of dwitness. Keys missing from the file are filled with the defaults.

    Returns:
        Dict[str, Any]: Configuration of dwitness.
    """
    config_dir = get_config_dir()
    config = dict(default_settings)
    if os.path.exists(config_dir):
        stored = read_json(config_dir)
        if not isinstance(stored, dict):
            raise ValueError(f'Configuration file "{config_dir}" does not hold a JSON object.')
        config.update(stored)
    return config

def set_config(**kwargs: Any) -> None:
    """Store configuration values for dwitness. Only known keys are accepted.

    Raises:
        ValueError: If an unknown key is given.
    """
    unknown = list(filter(lambda x: x not in default_settings.keys(), kwargs.keys()))
    if len(unknown) != 0:
        raise ValueError(f'Unknown configuration keys: {", ".join(unknown)}.')
    config = get_config()
    for k, v in kwargs.items():
        if v is not None:
            config[k] = os.path.abspath(v) if k == 'output_home' else v
    save_json(config, get_config_dir())

def worker_count(config: Optional[Dict[str, Any]] = None) -> int:
    """Number of parallel workers. The DW_THREADS environment variable takes precedence over the configuration file.

    Args:
        config (Optional[Dict[str, Any]], optional): Configuration to read the "threads" key from. If None is given, only the environment is consulted. Defaults to None.

    Returns:
        int: Worker count for joblib, -1 meaning all cores.
    """
    env = os.environ.get('DW_THREADS', '').strip()
    if env != '':
        threads = int(env)
    elif (config is not None) and (config.get('threads') is not None):
        threads = int(config['threads'])
    else:
        return -1
    if threads < 1:
        raise ValueError(f'Thread count must be positive, got {threads}.')
    return threads

### Parallel evaluation
def parallel_map(func: Callable[[Any], Any], items: Sequence[Any], n_jobs: int = -1,
                 progress: bool = False, desc: Optional[str] = None) -> List[Any]:
    """Evaluate func over items with a thread pool, returning results in the order of items.

    Args:
        func (Callable[[Any], Any]): Function of one item.
        items (Sequence[Any]): Items to evaluate.
        n_jobs (int, optional): Number of workers, -1 for all cores. Defaults to -1.
        progress (bool, optional): Whether to show a progress bar. Defaults to False.
        desc (Optional[str], optional): Progress bar label. Defaults to None.

    Returns:
        List[Any]: Results, one slot per item.
    """
    from joblib import Parallel, delayed
    from tqdm import tqdm
    if (n_jobs == 1) or (len(items) <= 1):
        iterator = map(func, items)
    else:
        iterator = Parallel(n_jobs=n_jobs, backend='threading', return_as='generator')(delayed(func)(item) for item in items)
    return list(tqdm(iterator, total=len(items), desc=desc, disable=not progress, leave=False))
