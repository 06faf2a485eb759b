"""Two-branch SSH quasiparticle theory, multichain Rabi wave packets and
Raman peak regularity checks."""

from .band import (EQUILIBRIUM, INVERTED, SAMPLE_PARAMS, BandSample, Branch, ChainParams,
                   OccupationState, band_sample, dispersion, gap_function, k_grid,
                   quasiparticle_energy)
from .groundstate import (GroundStateResult, energy_elliptic, energy_expansion,
                          energy_quadrature, minimize_dimerization)
from .rabi import (PacketState, TubeConfig, build_initial_packet, circulant_modes, evolve,
                   inversion, inversion_trace, revival_spectrum)
from .spectra import (CoherenceInput, PeakTable, afeswr_splittings, coherence_length,
                      load_fixtures, peak_ratios, peak_shifts, regularity_report, window_check)
from .stability import (ConditionReport, condition_first, condition_second, condition_third,
                        stability_scan)

__version__ = "0.1.0"
