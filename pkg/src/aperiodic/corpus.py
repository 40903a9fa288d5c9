"""Built-in examples: substitutions and a few explicitly given sequences."""

from __future__ import annotations

from .errors import ConfigError
from .symcore import Alphabet, DictionarySlice, full_shift_slice, slice_from_words
from .subst import Substitution

AB = Alphabet(("a", "b"))

SUBSTITUTION_RULES: dict[str, tuple[tuple[str, ...], dict]] = {
    "fibonacci": (("a", "b"), {"a": "ab", "b": "a"}),
    "silver-mean": (("a", "b"), {"a": "aab", "b": "a"}),
    "thue-morse": (("a", "b"), {"a": "ab", "b": "ba"}),
    "period-doubling": (("a", "b"), {"a": "ab", "b": "aa"}),
    "rudin-shapiro": (("A", "B", "C", "D"), {"A": "AB", "B": "AC", "C": "DB", "D": "DC"}),
    "table": (("a", "b", "c", "d"), {
        "a": ["ba", "da"],
        "b": ["ac", "bb"],
        "c": ["cb", "cd"],
        "d": ["dd", "ac"],
    }),
    "sierpinski": (("a", "b"), {
        "a": ["aaa", "aaa", "aaa"],
        "b": ["bbb", "bab", "bbb"],
    }),
}

# sources given by an explicit bi-infinite word rather than a substitution
SEQUENCE_SOURCES = ("one-defect", "full-shift", "step", "step-shifted")

BUILTINS = tuple(SUBSTITUTION_RULES) + SEQUENCE_SOURCES

ONE_DIM_SUBSTITUTIONS = ("fibonacci", "silver-mean", "thue-morse", "period-doubling", "rudin-shapiro")


def substitution(name: str) -> Substitution:
    try:
        letters, rules = SUBSTITUTION_RULES[name]
    except KeyError:
        raise ConfigError(f"no built-in substitution named {name!r}") from None
    return Substitution.from_rules(letters, rules)


def is_substitution(name: str) -> bool:
    return name in SUBSTITUTION_RULES


def sequence_dictionary(name: str, cap: int) -> DictionarySlice:
    """Dictionary slices of the explicitly given one-dimensional examples.

    one-defect    ...aaa b aaa...      (a single b)
    step          ...aaa|bbb...        (a on the left half, b on the right)
    step-shifted  ...aaab|abbb...
    full-shift    every word
    """
    pad = "a" * (cap + 1)
    padb = "b" * (cap + 1)
    if name == "one-defect":
        return slice_from_words(AB, [pad + "b" + pad], cap)
    if name == "step":
        return slice_from_words(AB, [pad + padb], cap)
    if name == "step-shifted":
        return slice_from_words(AB, [pad + "ba" + padb], cap)
    if name == "full-shift":
        return full_shift_slice(AB, cap)
    raise ConfigError(f"no built-in sequence named {name!r}")
