"""Excitation energy transfer in chromophore networks as a directed quantum walk.

The channel evolves under a secular Lindblad master equation written as a
linear system in Liouville space. From it the package computes the transfer
efficiency to an acceptor, the mean transfer time, and sensitivities of the
efficiency to each physical process.
"""

__version__ = "0.1.0"

from .model import (HBAR, KB, BathSpec, DensityState, NetworkError, NetworkSpec, dipole_coupling,
                    energy_to_omega, fmo_path, initial_state, load_bath, load_fmo, load_network,
                    omega_to_energy, save_network, serialize_network)
from .spectral import (ExcitonBasis, FrequencyGroup, bohr_frequencies, bose_occupation, diagonalize,
                       phonon_rate, spectral_density)
from .lindblad import (ChannelSet, EffectiveHamiltonian, build_channels, effective_hamiltonian,
                       gibbs_state, jump_tensors, phonon_generators)
from .liouville import (PARTS, Supermatrix, build_model, build_supermatrix, build_supermatrix_exciton,
                        classical_projection, devectorize, vectorize)
from .dynamics import (NotHurwitzError, Trajectory, propagate, quadrature_integrals, spectral_abscissa,
                       stationary_integrals)
from .analysis import (EfficiencyReport, GroverReport, SusceptibilityReport, ete, ete_quadrature,
                       grover_check, hessian, pathway_map, site_pair_susceptibility, susceptibility,
                       sweep)
