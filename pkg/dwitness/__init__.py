from .Physics.chain import ChainParams, DisorderSpec, WitnessResult
from .Witness.clean import clean_witness, zeroT_critical_field
from .Witness.perturbative import perturbative_witness
from .Oracle.free_fermion import oracle_witness, oracle_result
from .Scan.phase_grid import PhaseGrid, scan


__version__ = '0.1.0'
