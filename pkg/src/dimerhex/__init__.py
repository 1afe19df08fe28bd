"""Minimal dimeric hexagonal tight-binding model: spectra, degeneracy locus,
dynamical algebra, discrete Wigner portraits and ensemble bookkeeping."""
from .model import CouplingSet, DecayLaw, SiteLayout, build_full_hamiltonian, build_layout, build_model_hamiltonian
from .spectral import Spectrum, closed_form_levels, closed_form_spectrum, cluster_degeneracies, eigensolve, run_pipeline
from .locus import find_critical_angle, locus_F, locus_couplings, locus_energy, sweep_couplings, sweep_geometry, sweep_locus
from .algebra import build_generators, build_symmetry_operator, reassemble, vector_decomposition
from .wigner import invariant_rows, support, wigner_c3, wigner_full, wigner_z2
from .ensemble import ChainSpec, ParameterLoop, berry_phase, critical_chain, scaling_report

__version__ = "0.1.0"
