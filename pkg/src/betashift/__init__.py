"""Exact beta-expansions, beta-shift cylinders, and Schmidt games that avoid subshifts."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AmbiguousDigit,
    BetaShiftError,
    ComparisonUndecided,
    CoverTooLarge,
    FinitenessUndecided,
    IllegalMove,
    NotAdmissible,
    NotConcatenable,
    NotFound,
    NotParryAdmissible,
    PrecisionExhausted,
)
from .numeric import Interval  # noqa: E402
from .beta_core import (  # noqa: E402
    Beta,
    CylinderInterval,
    PeriodicStream,
    cylinder_interval,
    expansion_of_one,
    greedy_expand,
    is_admissible,
    orbit,
    parry_check,
    parse_beta,
    pi_beta,
    quasi_greedy_expansion_of_one,
    shift_constant,
    solve_beta_from_digits,
)
from .sft_cantor import CantorCover, SftSpec, build_cover, distance_to_cover, witness_excluded_word  # noqa: E402
from .schmidt_game import (  # noqa: E402
    GameConfig,
    GameTranscript,
    Move,
    choose_k,
    choose_M,
    cylinder_in_interval,
    explicit_alpha,
    intersect_strategies,
    play,
    replay,
    verify_avoidance,
    white_avoidance_strategy,
)
from .transversality import SeriesPair, eval_g, falsify, scan  # noqa: E402
from .frequency import construct_divergent_point, divergence_gap, word_frequency_trace  # noqa: E402
