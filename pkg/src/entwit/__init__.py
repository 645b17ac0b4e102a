"""Nondestructive verification of noisy entangled-state ensembles.

Decide whether an ensemble's fidelity sits above or below a threshold
(witnessing) or equals one of two promised values (discrimination), using
copy-by-copy tests, counter-gate error counting, coarse-grained readout or
block parity checks, with exact statistics, Monte Carlo simulation, a dense
validation oracle and entanglement-resource accounting.
"""

from .errors import (DimensionCapError, EntwitError, OracleMismatchError,
                     UnsupportedCombinationError)
from .gates import (AmplitudeRegister, CoarseParams, apply_eng, bcnot,
                    block_parity, coarse_group, coarse_measure_prob,
                    counter_shift, lambda_sets)
from .protocols import (ProtocolReport, ResidualEnsemble, SimulationResult,
                        backaction_fidelity, discriminate,
                        optimize_block_size, run_p0, run_p1, run_p2, run_p3,
                        simulate_p0, simulate_p1, simulate_p2, simulate_p3,
                        witness_model, witness_rule)
from .resources import (ResourceLedger, YieldCurve, combined_yield,
                        compare_protocols, hashing_yield, recurrence_step)
from .states import (BellIndex, ErrorLabel, Family, StateSpec,
                     bell_diagonal_entropy, depolarize,
                     error_label_distribution, fidelity_of, make_state)
from .stats import (BinomialFailModel, BlockParityModel,
                    CounterDifferenceModel, DecisionRule, DiscriminationRule,
                    MeasurementStrategy, OutcomeDistribution, build_sigma,
                    chernoff_bound, discrimination_rule, kl_divergence,
                    strategy_for, success_probability_discriminate,
                    success_probability_witness)

__version__ = "0.1.0"
