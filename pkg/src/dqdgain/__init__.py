"""Correlated gain and loss in a driven DQD-resonator system.

Library layout:

    spectral   bath spectral functions C(w): ohmic, piezo, tabulated
    rates      closed-form second- and fourth-order dissipation rates
    liouville  operators, superoperators, exact steady states (oracle)
    meanfield  coupled qubit/resonator mean-field fixed point and gain
    pipeline   bias sweeps, rate landscapes, locked parameter sets, CSV
    cli        config-driven batch front end (`dqdgain --config run.ini`)
"""

from .errors import (AmbiguousSteadyStateError, ConfigError, DegenerateQubitError,
                     DomainError, ExtrapolationError, InvalidAMatrixError,
                     MasingInstabilityError, NotTracePreservingError,
                     ResonanceError, UndefinedDerivativeError, UndefinedGainError)
from .liouville import (AMatrixBlocks, HilbertSpace, build_a_blocks,
                        build_fourth_order, build_fourth_order_from_blocks,
                        build_full_liouvillian, decompose_a, dissipator_superop,
                        dissipator_sum_expand, field_amplitude, lindblad_apply,
                        mean_photon_number, operator_basis_16, qubit_populations,
                        steady_state)
from .meanfield import (ComparisonReport, QubitState, ResonatorField, SolveReport,
                        SolverOptions, alpha_update, gain, meanfield_vs_exact,
                        qubit_steady_state, solve_coupled)
from .pipeline import (Fig2Result, LandscapeResult, SweepResult, SweepSpec,
                       TemperaturePair, gaussian_smooth, run_fig2,
                       run_gain_sweep, run_high_temperature_compare,
                       run_rate_landscape)
from .rates import (CoefficientSet, DominantRates, GammaTable, SystemParams,
                    Variant, coefficients, dispersive_shifts, dominant_rates,
                    effective_gamma, effective_kappa, full_gamma_table, mixing,
                    second_order_rates)
from .spectral import (BathModel, OhmicBath, PiezoBath, PiezoMaterial,
                       TabulatedBath, piezo_constants,
                       resonator_angular_frequency, spike_bath)

__version__ = "0.1.0"
