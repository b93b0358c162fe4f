"""Ideal convergence of subsequences and rearrangements at finite scale.

Trilean (member / non-member / undecided) decisions for the Fin and density
ideals, convergence detectors built on them, explicit constructions of
divergent selections, and seeded Monte Carlo estimators over random ones.
"""

__version__ = "0.1.0"

from .construction import (Construction, NotConstructible, WitnessExhausted, build_divergent_perm,
                           build_divergent_subseq, construct, extend_prefix, in_am)
from .convergence import (Cauchy, Convergence, WitnessPair, eps_grid, i_cauchy, i_converges,
                          indicator_sequence, witness_pair)
from .ideals import (DENSITY, FIN, IdealSpec, IndexSet, Invariance, Verdict, check_witness,
                     density_profile, image_set, interval_witness, is_invariant_sample, membership)
from .selection import (CoinVector, PermPrefix, SubseqPrefix, apply_selection, coins_to_subseq,
                        sample_lambda, sample_perm, subseq_to_coins)
from .sequences import DomainError, Metric, PointSeq, builtin
