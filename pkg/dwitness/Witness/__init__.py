from .clean import clean_witness, clean_signed_witness, lnZ0_density
from .perturbative import perturbative_witness, G_quenched, G_annealed, kernel_K
