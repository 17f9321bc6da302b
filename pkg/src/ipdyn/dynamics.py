"""Finite-window symbolic dynamics: substitution subshift languages,
cylinder sets, return-time sets, descending open-set chains, and an
exact rotation control system.

Points are never materialized: a query about open sets is answered by
scanning admissible words (factors of a long expansion of the
substitution).  All answers are exact at window scale and every
feasibility bound is checked up front and reported, never silently
truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

from .gammapoly import GammaPolynomial
from .intpoly import IntegralPolynomial, essentially_distinct


class BadRules(ValueError):
    """A substitution rule set is malformed."""


class WindowTooLarge(ValueError):
    """A query needs admissible words longer than the configured bound."""


class HypothesisViolation(ValueError):
    """A polynomial family violates the nonconstant / pairwise-distinct
    hypotheses required by polynomial return-set queries."""


class ZeroPower(ValueError):
    """Power-return queries need a nonzero exponent."""


class BadModulus(ValueError):
    """A rotation needs a modulus of at least 1."""


# -- substitution systems ---------------------------------------------------

_MIN_EXPANSION = 4096
_EXPANSION_MARGIN = 32


class SubstitutionSystem:
    """A substitution subshift described by symbol rewriting rules.

    The admissible language is the factor set of long expansions of the
    seed symbols.  ``depth=None`` grows each seed until the expansion is
    comfortably longer than any requested factor; a fixed integer depth
    applies the rules exactly that many times.  Substitutions that stop
    growing (for instance a single fixed letter) are closed off
    periodically, so the constant system has language a, aa, aaa, ...
    """

    def __init__(
        self,
        rules: Mapping[str, str],
        *,
        seeds: Sequence[str] | None = None,
        depth: int | None = None,
        max_word_length: int = 5000,
    ):
        if not rules:
            raise BadRules("at least one rule is required")
        alphabet = tuple(sorted(rules))
        for sym, image in rules.items():
            if len(sym) != 1:
                raise BadRules(f"symbols must be single characters: {sym!r}")
            if not image:
                raise BadRules(f"rule for {sym!r} is erasing")
            for c in image:
                if c not in rules:
                    raise BadRules(
                        f"rule for {sym!r} uses unknown symbol {c!r}"
                    )
        self.rules = dict(rules)
        self.alphabet = alphabet
        self.seeds = tuple(seeds) if seeds is not None else (alphabet[0],)
        for s in self.seeds:
            if s not in self.rules:
                raise BadRules(f"seed {s!r} has no rule")
        if depth is not None and depth < 0:
            raise BadRules("depth must be nonnegative")
        self.depth = depth
        self.max_word_length = max_word_length
        self._factor_cache: dict[int, frozenset[str]] = {}

    def _apply(self, word: str) -> str:
        return "".join(self.rules[c] for c in word)

    def _grow(self, seed: str, target: int) -> str:
        word = seed
        if self.depth is not None:
            for _ in range(self.depth):
                word = self._apply(word)
            return word
        while len(word) < target:
            nxt = self._apply(word)
            if len(nxt) <= len(word):
                # non-growing substitution: periodic closure
                reps = -(-target // len(nxt))
                return nxt * reps
            word = nxt
        return word[:target]

    def _target_length(self, factor_length: int) -> int:
        return max(_EXPANSION_MARGIN * factor_length, _MIN_EXPANSION)

    def expansions(self, factor_length: int) -> tuple[str, ...]:
        """One long expansion per seed, deterministically trimmed so the
        result depends only on the requested factor length."""
        target = self._target_length(factor_length)
        return tuple(self._grow(seed, target) for seed in self.seeds)

    def factors(self, length: int) -> frozenset[str]:
        """All admissible words of exactly the given length."""
        if length < 1:
            raise ValueError("factor length must be >= 1")
        if length > self.max_word_length:
            raise WindowTooLarge(
                f"factor length {length} exceeds bound {self.max_word_length}"
            )
        cached = self._factor_cache.get(length)
        if cached is not None:
            return cached
        found: set[str] = set()
        for word in self.expansions(length):
            for i in range(len(word) - length + 1):
                found.add(word[i : i + length])
        if not found:
            # only possible when every expansion is shorter than length
            # (a fixed depth that was set too small)
            raise WindowTooLarge(
                f"no expansion reaches length {length}; raise depth or use "
                "automatic growth"
            )
        result = frozenset(found)
        self._factor_cache[length] = result
        return result

    def language(self, max_length: int) -> frozenset[str]:
        """All admissible words of length 1..max_length."""
        out: set[str] = set()
        for length in range(1, max_length + 1):
            out |= self.factors(length)
        return frozenset(out)

    def is_admissible(self, word: str) -> bool:
        if word == "":
            return True
        if any(c not in self.rules for c in word):
            return False
        return word in self.factors(len(word))

    def describe(self) -> str:
        rules = ";".join(f"{s}->{self.rules[s]}" for s in self.alphabet)
        return f"substitution[{rules}|seeds={','.join(self.seeds)}]"

    def __repr__(self) -> str:
        return f"<SubstitutionSystem {self.describe()}>"


def parse_rules(text: str) -> dict[str, str]:
    """Parse ``0 -> 0010; 1 -> 1`` rule syntax."""
    rules: dict[str, str] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "->" not in chunk:
            raise BadRules(f"rule {chunk!r} lacks '->'")
        left, right = (part.strip() for part in chunk.split("->", 1))
        if len(left) != 1:
            raise BadRules(f"rule source must be one symbol: {left!r}")
        if left in rules:
            raise BadRules(f"duplicate rule for {left!r}")
        rules[left] = right
    if not rules:
        raise BadRules(f"no rules found in {text!r}")
    return rules


def chacon(**kwargs) -> SubstitutionSystem:
    """The default candidate system: 0 -> 0010, 1 -> 1, seeded at 0."""
    return SubstitutionSystem({"0": "0010", "1": "1"}, seeds=("0",), **kwargs)


def fibonacci(**kwargs) -> SubstitutionSystem:
    return SubstitutionSystem({"0": "01", "1": "0"}, seeds=("0",), **kwargs)


# -- cylinders and return sets ----------------------------------------------


@dataclass(frozen=True)
class CylinderSet:
    """All points whose coordinates 0..len(word)-1 spell the word; the
    empty word is the whole space."""

    word: str

    @property
    def is_whole_space(self) -> bool:
        return self.word == ""


WHOLE_SPACE = CylinderSet("")


def require_admissible(sys: SubstitutionSystem, cyl: CylinderSet) -> None:
    if not sys.is_admissible(cyl.word):
        raise ValueError(f"cylinder word {cyl.word!r} is not admissible")


@dataclass(frozen=True)
class ReturnSet:
    """Members of [-window, window] satisfying a co-occurrence query,
    together with the provenance needed to reproduce it."""

    window: int
    members: frozenset[int]
    provenance: tuple[tuple[str, str], ...] = ()

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def __contains__(self, n: int) -> bool:
        return n in self.members


Constraint = tuple[int, str]  # (offset, word); empty words are ignored


def _pattern(constraints: Sequence[Constraint]) -> tuple[tuple[Constraint, ...], int]:
    """Normalize constraints so the least constrained offset is 0.

    Returns the shifted constraints and the span of the admissible word
    needed to carry them; an empty pattern has span 0 (whole space).
    """
    cells = [(off, w) for off, w in constraints if w]
    if not cells:
        return (), 0
    base = min(off for off, _ in cells)
    span = max(off + len(w) for off, w in cells) - base
    return tuple((off - base, w) for off, w in cells), span


def _matches(word: str, cells: Sequence[Constraint]) -> bool:
    return all(word[off : off + len(w)] == w for off, w in cells)


def _members_by_language(
    sys: SubstitutionSystem,
    ns: Sequence[int],
    constraints_for: Callable[[int], Sequence[Constraint]],
) -> frozenset[int]:
    patterns = {n: _pattern(constraints_for(n)) for n in ns}
    max_span = max((span for _, span in patterns.values()), default=0)
    if max_span > sys.max_word_length:
        raise WindowTooLarge(
            f"query needs words of length {max_span}, bound is "
            f"{sys.max_word_length}"
        )
    factor_set = sys.factors(max_span) if max_span else None
    members = set()
    for n in ns:
        cells, span = patterns[n]
        if span == 0:
            members.add(n)
            continue
        assert factor_set is not None
        if any(_matches(f, cells) for f in factor_set):
            members.add(n)
    return frozenset(members)


def _members_by_orbit(
    sys: SubstitutionSystem,
    ns: Sequence[int],
    constraints_for: Callable[[int], Sequence[Constraint]],
) -> frozenset[int]:
    """Independent route: match occurrence positions inside long
    expansions of the substitution instead of scanning factor sets."""
    patterns = {n: _pattern(constraints_for(n)) for n in ns}
    max_span = max((span for _, span in patterns.values()), default=0)
    if max_span > sys.max_word_length:
        raise WindowTooLarge(
            f"query needs words of length {max_span}, bound is "
            f"{sys.max_word_length}"
        )
    words = sorted({w for cells, _ in patterns.values() for _, w in cells})
    expansions = sys.expansions(max_span) if max_span else ()
    occ: list[dict[str, set[int]]] = []
    for text in expansions:
        table: dict[str, set[int]] = {}
        for w in words:
            positions: set[int] = set()
            start = text.find(w)
            while start != -1:
                positions.add(start)
                start = text.find(w, start + 1)
            table[w] = positions
        occ.append(table)
    members = set()
    for n in ns:
        cells, span = patterns[n]
        if span == 0:
            members.add(n)
            continue
        anchor_off, anchor_word = min(
            cells, key=lambda c: sum(len(table[c[1]]) for table in occ)
        )
        hit = False
        for i, text in enumerate(expansions):
            table = occ[i]
            limit = len(text) - span
            for a in table[anchor_word]:
                q = a - anchor_off
                if q < 0 or q > limit:
                    continue
                if all(q + off in table[w] for off, w in cells):
                    hit = True
                    break
            if hit:
                break
        if hit:
            members.add(n)
    return frozenset(members)


def _compute_members(
    sys: SubstitutionSystem,
    ns: Sequence[int],
    constraints_for: Callable[[int], Sequence[Constraint]],
    method: str,
) -> frozenset[int]:
    if method == "language":
        return _members_by_language(sys, ns, constraints_for)
    if method == "orbit":
        return _members_by_orbit(sys, ns, constraints_for)
    raise ValueError(f"unknown method {method!r}")


def return_set(
    sys: SubstitutionSystem,
    u: CylinderSet,
    v: CylinderSet,
    window: int,
    *,
    method: str = "language",
) -> ReturnSet:
    """{n in [-W, W] : some admissible word carries u at 0 and v at n}.

    Negative n is the symmetric check with the roles of u and v swapped,
    which is the two-sided convention for factor languages.
    """
    if window < 0:
        raise ValueError("window must be nonnegative")
    require_admissible(sys, u)
    require_admissible(sys, v)
    ns = range(-window, window + 1)
    members = _compute_members(
        sys, ns, lambda n: ((0, u.word), (n, v.word)), method
    )
    return ReturnSet(
        window=window,
        members=members,
        provenance=(
            ("op", "return-set"),
            ("system", sys.describe()),
            ("u", u.word),
            ("v", v.word),
            ("window", str(window)),
        ),
    )


def return_set_any(
    sys: SubstitutionSystem,
    u: CylinderSet,
    vs: Sequence[CylinderSet],
    window: int,
    *,
    method: str = "language",
) -> ReturnSet:
    """Return set against a finite union of cylinders: the union of the
    per-cylinder return sets.  Enlarging the union never shrinks it."""
    members: frozenset[int] = frozenset()
    for v in vs:
        members |= return_set(sys, u, v, window, method=method).members
    return ReturnSet(
        window=window,
        members=members,
        provenance=(
            ("op", "return-set-union"),
            ("system", sys.describe()),
            ("u", u.word),
            ("vs", "|".join(v.word for v in vs)),
            ("window", str(window)),
        ),
    )


def check_polynomial_hypotheses(polys: Sequence[IntegralPolynomial]) -> None:
    """Every polynomial nonconstant, every pairwise difference nonconstant."""
    for p in polys:
        if p.is_constant:
            raise HypothesisViolation(f"polynomial {p} is constant")
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if not essentially_distinct(polys[i], polys[j]):
                raise HypothesisViolation(
                    f"polynomials {polys[i]} and {polys[j]} differ by a constant"
                )


def poly_return_set(
    sys: SubstitutionSystem,
    u: CylinderSet,
    vs: Sequence[CylinderSet],
    polys: Sequence[IntegralPolynomial],
    window: int,
    *,
    method: str = "language",
) -> ReturnSet:
    """{n : one admissible word carries u at 0 and each v_i at p_i(n)}."""
    if len(vs) != len(polys):
        raise ValueError("need one polynomial per cylinder")
    if not vs:
        raise ValueError("need at least one cylinder/polynomial pair")
    if window < 0:
        raise ValueError("window must be nonnegative")
    check_polynomial_hypotheses(polys)
    require_admissible(sys, u)
    for v in vs:
        require_admissible(sys, v)

    def constraints_for(n: int) -> Sequence[Constraint]:
        cells = [(0, u.word)]
        cells.extend((p(n), v.word) for p, v in zip(polys, vs))
        return cells

    ns = range(-window, window + 1)
    members = _compute_members(sys, ns, constraints_for, method)
    return ReturnSet(
        window=window,
        members=members,
        provenance=(
            ("op", "poly-return-set"),
            ("system", sys.describe()),
            ("u", u.word),
            ("vs", "|".join(v.word for v in vs)),
            ("polys", "; ".join(str(p) for p in polys)),
            ("window", str(window)),
        ),
    )


def required_span(
    polys: Sequence[IntegralPolynomial],
    u: CylinderSet,
    vs: Sequence[CylinderSet],
    window: int,
) -> int:
    """Longest admissible word a polynomial query will need; lets callers
    report feasibility before computing."""
    worst = 0
    for n in range(-window, window + 1):
        cells = [(0, u.word)] + [(p(n), v.word) for p, v in zip(polys, vs)]
        _, span = _pattern(cells)
        worst = max(worst, span)
    return worst


def power_return_set(
    sys: SubstitutionSystem,
    k: int,
    u: CylinderSet,
    v: CylinderSet,
    window: int,
    *,
    method: str = "language",
) -> ReturnSet:
    """{n : k*n lies in the plain return set over the inflated window}."""
    if k == 0:
        raise ZeroPower("power must be nonzero")
    base = return_set(sys, u, v, abs(k) * window, method=method)
    members = frozenset(
        n for n in range(-window, window + 1) if k * n in base.members
    )
    return ReturnSet(
        window=window,
        members=members,
        provenance=base.provenance + (("power", str(k)),),
    )


Transform = Union[SubstitutionSystem, tuple[SubstitutionSystem, int]]


def product_return_set(
    transforms: Sequence[Transform],
    us: Sequence[CylinderSet],
    vs: Sequence[CylinderSet],
    window: int,
    *,
    method: str = "language",
) -> ReturnSet:
    """Return set of a product of (possibly powered) systems against
    box open sets: the window intersection of the component sets."""
    if not (len(transforms) == len(us) == len(vs)):
        raise ValueError("one (u, v) pair per component is required")
    if not transforms:
        raise ValueError("at least one component is required")
    members: frozenset[int] | None = None
    described = []
    for t, u, v in zip(transforms, us, vs):
        sys_i, k = t if isinstance(t, tuple) else (t, 1)
        comp = power_return_set(sys_i, k, u, v, window, method=method)
        described.append(f"{sys_i.describe()}^{k}")
        members = comp.members if members is None else members & comp.members
    assert members is not None
    return ReturnSet(
        window=window,
        members=members,
        provenance=(
            ("op", "product-return-set"),
            ("components", " x ".join(described)),
            ("window", str(window)),
        ),
    )


# -- minimality probe ---------------------------------------------------------


@dataclass(frozen=True)
class MinimalityReport:
    """Whether every admissible long word contains every admissible short
    word, and the least radius at which that holds."""

    word_length: int
    scan_limit: int
    radius: int | None
    passed: bool
    missing: tuple[str, str] | None  # (long word, absent short word)


def minimality_probe(
    sys: SubstitutionSystem, word_length: int, scan_limit: int
) -> MinimalityReport:
    if word_length < 1 or scan_limit < word_length:
        raise ValueError("need 1 <= word_length <= scan_limit")
    short = sorted(sys.factors(word_length))
    missing: tuple[str, str] | None = None
    for radius in range(word_length, scan_limit + 1):
        missing = None
        for w in sorted(sys.factors(radius)):
            for u in short:
                if u not in w:
                    missing = (w, u)
                    break
            if missing:
                break
        if missing is None:
            return MinimalityReport(word_length, scan_limit, radius, True, None)
    return MinimalityReport(word_length, scan_limit, None, False, missing)


# -- descending open-set chains ----------------------------------------------


class WitnessExhausted(RuntimeError):
    """No admissible word realizes the next chain level inside the
    window; carries the failure depth and the partial chain."""

    def __init__(self, depth: int, partial: "Lemma213Chain"):
        self.depth = depth
        self.partial = partial
        super().__init__(f"no transitivity witness at depth {depth}")


@dataclass(frozen=True)
class Pattern:
    """A finite partial configuration: (position, symbol) cells."""

    cells: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        cells = tuple(sorted(self.cells))
        seen: dict[int, str] = {}
        for pos, sym in cells:
            if seen.get(pos, sym) != sym:
                raise ValueError(f"conflicting symbols at position {pos}")
            seen[pos] = sym
        object.__setattr__(self, "cells", tuple(sorted(seen.items())))

    @classmethod
    def from_word(cls, word: str, offset: int = 0) -> "Pattern":
        return cls(tuple((offset + i, c) for i, c in enumerate(word)))

    @property
    def is_trivial(self) -> bool:
        return not self.cells

    def shifted(self, s: int) -> "Pattern":
        return Pattern(tuple((pos + s, sym) for pos, sym in self.cells))

    def merged(self, other: "Pattern") -> "Pattern | None":
        """Combined constraints, or None on a symbol conflict."""
        table = dict(self.cells)
        for pos, sym in other.cells:
            if table.get(pos, sym) != sym:
                return None
            table[pos] = sym
        return Pattern(tuple(table.items()))

    def bounds(self) -> tuple[int, int]:
        """(lo, hi) half-open position range; (0, 0) when trivial."""
        if not self.cells:
            return (0, 0)
        positions = [pos for pos, _ in self.cells]
        return min(positions), max(positions) + 1


@dataclass(frozen=True)
class SymbolicOpenSet:
    """A finite union of partial configurations."""

    patterns: tuple[Pattern, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "patterns", tuple(sorted(set(self.patterns), key=lambda p: p.cells))
        )

    @classmethod
    def from_cylinder(cls, cyl: CylinderSet, offset: int = 0) -> "SymbolicOpenSet":
        return cls((Pattern.from_word(cyl.word, offset),))

    def intersect(self, other: "SymbolicOpenSet") -> "SymbolicOpenSet":
        merged = []
        for p in self.patterns:
            for q in other.patterns:
                r = p.merged(q)
                if r is not None:
                    merged.append(r)
        return SymbolicOpenSet(tuple(merged))

    def shifted(self, s: int) -> "SymbolicOpenSet":
        return SymbolicOpenSet(tuple(p.shifted(s) for p in self.patterns))


def pattern_realizable(sys: SubstitutionSystem, pattern: Pattern) -> bool:
    """True when some admissible word carries every cell of the pattern."""
    if pattern.is_trivial:
        return True
    lo, hi = pattern.bounds()
    span = hi - lo
    if span > sys.max_word_length:
        raise WindowTooLarge(
            f"pattern span {span} exceeds bound {sys.max_word_length}"
        )
    cells = tuple((pos - lo, sym) for pos, sym in pattern.cells)
    for text in sys.expansions(span):
        limit = len(text) - span
        for a in range(limit + 1):
            if all(text[a + off] == sym for off, sym in cells):
                return True
    return False


def open_set_nonempty(sys: SubstitutionSystem, oset: SymbolicOpenSet) -> bool:
    return any(pattern_realizable(sys, p) for p in oset.patterns)


def _gamma_shift(g: GammaPolynomial, m: int) -> int:
    # Instantiate every generator as the one shift map: exponents add.
    return sum(p(m) for p in g.exps)


@dataclass(frozen=True)
class Lemma213Chain:
    """Descending open-set levels: ``levels[n][i]`` refines cylinder i
    after consuming shifts[0..n]."""

    shifts: tuple[int, ...]
    levels: tuple[tuple[SymbolicOpenSet, ...], ...]
    base_power: int


def lemma213_chain(
    sys: SubstitutionSystem,
    cylinders: Sequence[CylinderSet],
    gammas: Sequence[GammaPolynomial],
    shifts: Sequence[int],
    *,
    base_power: int = 1,
) -> Lemma213Chain:
    """Build the descending chain V_i ⊇ V_i^(0) ⊇ V_i^(1) ⊇ ... by the
    recursion V_i^(n) = V_i^(n-1) ∩ (g_i(m_n) T^{-n})^{-1} V_i.

    Each level is checked nonempty against the admissible language;
    failure raises WitnessExhausted with the partial chain.  Shift n
    must satisfy |m_n| > n, mirroring the transitivity bookkeeping the
    recursion encodes.
    """
    if len(cylinders) != len(gammas):
        raise ValueError("need one exponent element per cylinder")
    for cyl in cylinders:
        require_admissible(sys, cyl)
    shifts = tuple(int(m) for m in shifts)
    for n, m in enumerate(shifts):
        if abs(m) <= n:
            raise ValueError(f"shift {m} at depth {n} must satisfy |m| > {n}")
    current = [SymbolicOpenSet.from_cylinder(cyl) for cyl in cylinders]
    levels: list[tuple[SymbolicOpenSet, ...]] = []
    for n, m in enumerate(shifts):
        nxt = []
        for i, (cyl, g) in enumerate(zip(cylinders, gammas)):
            s = _gamma_shift(g, m) - n * base_power
            refined = current[i].intersect(
                SymbolicOpenSet.from_cylinder(cyl, offset=s)
            )
            nxt.append(refined)
        if not all(open_set_nonempty(sys, o) for o in nxt):
            raise WitnessExhausted(
                n, Lemma213Chain(shifts[:n], tuple(levels), base_power)
            )
        current = nxt
        levels.append(tuple(current))
    return Lemma213Chain(shifts, tuple(levels), base_power)


def find_chain_shifts(
    sys: SubstitutionSystem,
    cylinders: Sequence[CylinderSet],
    gammas: Sequence[GammaPolynomial],
    depth: int,
    *,
    search_window: int,
    base_power: int = 1,
) -> Lemma213Chain:
    """Greedy shift search: at each level take the least strictly larger
    candidate in [1, search_window] that keeps every level nonempty."""
    shifts: list[int] = []
    prev = 0
    for n in range(depth + 1):
        found = None
        for m in range(max(prev + 1, n + 1), search_window + 1):
            try:
                chain = lemma213_chain(
                    sys, cylinders, gammas, shifts + [m], base_power=base_power
                )
            except WitnessExhausted:
                continue
            found = m
            break
        if found is None:
            raise WitnessExhausted(
                n,
                lemma213_chain(
                    sys, cylinders, gammas, shifts, base_power=base_power
                ),
            )
        shifts.append(found)
        prev = found
    return lemma213_chain(sys, cylinders, gammas, shifts, base_power=base_power)


@dataclass(frozen=True)
class ContainmentCheck:
    level: int
    cylinder_index: int
    shift_index: int
    holds: bool


def _pattern_contained_in_cylinder(
    sys: SubstitutionSystem, pattern: Pattern, cyl: CylinderSet
) -> bool:
    """Brute-force inclusion: every admissible word matching the pattern
    must also spell the cylinder word at position 0."""
    word = cyl.word
    if word == "":
        return True
    plo, phi = pattern.bounds()
    lo = min(plo, 0)
    hi = max(phi, len(word))
    span = hi - lo
    if span > sys.max_word_length:
        raise WindowTooLarge(
            f"inclusion span {span} exceeds bound {sys.max_word_length}"
        )
    cells = tuple((pos - lo, sym) for pos, sym in pattern.cells)
    target = tuple((i - lo, c) for i, c in enumerate(word))
    for f in sys.factors(span):
        if all(f[off] == sym for off, sym in cells):
            if not all(f[off] == sym for off, sym in target):
                return False
    # a pattern with no admissible realization is vacuously contained
    return True


def verify_chain(
    sys: SubstitutionSystem,
    cylinders: Sequence[CylinderSet],
    gammas: Sequence[GammaPolynomial],
    chain: Lemma213Chain,
) -> tuple[bool, tuple[ContainmentCheck, ...]]:
    """Re-verify every displayed containment of the chain independently:
    shifting level n by the step-j map must land inside the cylinder."""
    checks: list[ContainmentCheck] = []
    ok = True
    for n, level in enumerate(chain.levels):
        for i, oset in enumerate(level):
            for j in range(n + 1):
                s = _gamma_shift(gammas[i], chain.shifts[j]) - j * chain.base_power
                image = oset.shifted(-s)
                holds = all(
                    _pattern_contained_in_cylinder(sys, p, cylinders[i])
                    for p in image.patterns
                )
                checks.append(ContainmentCheck(n, i, j, holds))
                ok = ok and holds
    return ok, tuple(checks)


# -- recurrence search ---------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceWitness:
    """An admissible word and a time n at which all the instantiated
    shifts return the word's start to itself to the agreed length."""

    n: int
    word: str
    shifts: tuple[int, ...]


def recurrence_search(
    sys: SubstitutionSystem,
    gammas: Sequence[GammaPolynomial],
    agreement_length: int,
    n_values: Iterable[int],
) -> RecurrenceWitness | None:
    """Scan for a word x and time n != 0 with x[0:L] == x[s_i : s_i+L]
    for every instantiated shift s_i; None when the range is exhausted.

    Absence over a finite range is inconclusive and callers flag it
    prominently rather than treating it as a refutation.
    """
    if agreement_length < 1:
        raise ValueError("agreement length must be >= 1")
    for n in n_values:
        if n == 0:
            continue
        shifts = tuple(_gamma_shift(g, n) for g in gammas)
        lo = min(0, min(shifts, default=0))
        hi = max(shifts, default=0) + agreement_length
        span = hi - lo
        if span > sys.max_word_length:
            raise WindowTooLarge(
                f"shifts at n={n} need words of length {span}, bound is "
                f"{sys.max_word_length}"
            )
        for text in sys.expansions(span):
            limit = len(text) - span
            for a in range(limit + 1):
                origin = a - lo
                ref = text[origin : origin + agreement_length]
                if all(
                    text[origin + s : origin + s + agreement_length] == ref
                    for s in shifts
                ):
                    return RecurrenceWitness(
                        n=n, word=text[a : a + span], shifts=shifts
                    )
    return None


# -- rotation control system ---------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Residues start..end-1 modulo the ambient modulus (half-open)."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise ValueError(f"empty arc [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    def contains(self, x: int, modulus: int) -> bool:
        return (x - self.start) % modulus < self.length


@dataclass(frozen=True)
class RotationControl:
    """x -> x + step on Z_modulus; a non-mixing control system used as a
    negative example generator.  The map is a bijection for any step;
    it is minimal exactly when the step is coprime to the modulus."""

    modulus: int
    step: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise BadModulus(f"modulus must be >= 1, got {self.modulus}")

    @property
    def is_minimal(self) -> bool:
        return math.gcd(self.step % self.modulus, self.modulus) == 1

    def describe(self) -> str:
        return f"rotation[q={self.modulus},p={self.step}]"


def rotation_probe(
    control: RotationControl,
    u: Arc,
    v1: Arc,
    v2: Arc,
    *,
    a1: int = 1,
    a2: int = 2,
    window: int,
) -> ReturnSet:
    """{n in [-W, W] : some x in U has x + a1*n*p in V1 and x + a2*n*p
    in V2 (mod q)}, computed exhaustively and exactly."""
    q, p = control.modulus, control.step
    for arc in (u, v1, v2):
        if arc.length > q:
            raise ValueError(f"arc longer than the modulus: {arc}")
    members = set()
    cache: dict[int, bool] = {}
    for n in range(-window, window + 1):
        np_ = (n * p) % q
        hit = cache.get(np_)
        if hit is None:
            hit = any(
                v1.contains(x + a1 * np_, q) and v2.contains(x + a2 * np_, q)
                for x in range(u.start, u.end)
            )
            cache[np_] = hit
        if hit:
            members.add(n)
    return ReturnSet(
        window=window,
        members=frozenset(members),
        provenance=(
            ("op", "rotation-probe"),
            ("system", control.describe()),
            ("u", f"{u.start}:{u.end}"),
            ("v1", f"{v1.start}:{v1.end}"),
            ("v2", f"{v2.start}:{v2.end}"),
            ("a1", str(a1)),
            ("a2", str(a2)),
            ("window", str(window)),
        ),
    )


# -- config-facing constructor ---------------------------------------------------


def build_system(
    spec: Mapping[str, str],
) -> Union[SubstitutionSystem, RotationControl]:
    """Build a system from a flat key/value mapping (config sections)."""
    kind = spec.get("kind", "substitution")
    if kind == "substitution":
        if "rules" not in spec:
            raise BadRules("substitution systems need a 'rules' entry")
        rules = parse_rules(spec["rules"])
        seeds: Sequence[str] | None = None
        if "seeds" in spec:
            seeds = tuple(s.strip() for s in spec["seeds"].split(",") if s.strip())
        depth: int | None = None
        if spec.get("depth", "auto") != "auto":
            depth = int(spec["depth"])
        max_word_length = int(spec.get("max-word-length", "5000"))
        return SubstitutionSystem(
            rules, seeds=seeds, depth=depth, max_word_length=max_word_length
        )
    if kind == "rotation":
        modulus = spec.get("q", spec.get("modulus"))
        step = spec.get("p", spec.get("step"))
        if modulus is None or step is None:
            raise BadRules("rotation systems need 'q' and 'p' entries")
        return RotationControl(int(modulus), int(step))
    raise BadRules(f"unknown system kind {kind!r}")
