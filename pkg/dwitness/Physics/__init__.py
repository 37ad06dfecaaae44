from .chain import ChainParams, DisorderSpec, WitnessResult, dispersion, fermi
