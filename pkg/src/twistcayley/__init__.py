"""Exact workbench for Cayley-style Mealy machines and the lamplighter
groups they generate."""

__version__ = "0.1.0"

from .algebra import (
    Endo,
    FiniteAbelianGroup,
    FiniteMonoid,
    make_cyclic_product,
    monoid_from_table,
)
from .mealy import (
    MealyMachine,
    act,
    act_word,
    cayley_machine,
    dual_machine,
    inverse_machine,
    portrait,
    twisted_cayley_machine,
)
from .series import (
    AffineSeriesMap,
    RationalEndoSeries,
    RationalPairSeries,
    alpha_of,
    check_series_realization,
    gamma,
    generator_map,
    mu_of,
)
from .lamplighter import (
    LamplighterElement,
    kernel_test,
    lamp_config_series,
    leading_lamp_recovery,
    word_to_lamplighter,
)

__all__ = [
    "__version__",
    "Endo",
    "FiniteAbelianGroup",
    "FiniteMonoid",
    "make_cyclic_product",
    "monoid_from_table",
    "MealyMachine",
    "act",
    "act_word",
    "cayley_machine",
    "dual_machine",
    "inverse_machine",
    "portrait",
    "twisted_cayley_machine",
    "AffineSeriesMap",
    "RationalEndoSeries",
    "RationalPairSeries",
    "alpha_of",
    "check_series_realization",
    "gamma",
    "generator_map",
    "mu_of",
    "LamplighterElement",
    "kernel_test",
    "lamp_config_series",
    "leading_lamp_recovery",
    "word_to_lamplighter",
]
