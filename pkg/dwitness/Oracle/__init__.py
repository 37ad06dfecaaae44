from .free_fermion import Realization, OracleEstimate, oracle_witness, oracle_result
