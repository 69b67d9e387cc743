"""Exact linear arithmetic over the rationals: Fourier-Motzkin elimination.

Atoms have the sense ``sum of coeff*name REL 0`` with REL one of ``< <= =``.
The reserved unit name carries the constant part and is never eliminated, so
affine facts stay homogeneous; adding ``unit > 0`` makes pair projections
exact for the scaled-comparison language.  Equalities are used for
substitution before lower/upper bounds are cross-combined, and a combined
atom is strict when either parent is.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import comm
from .comm import EQ, GE, GT, LE, LT, CommAtom, ResourceLimitError, UNIT, make_atom
from .terms import Atom

#: Abort threshold for one system during elimination.
ATOM_CAP = 5000


class LinAtom:
    """``sum(coeff * name) REL 0`` with coefficients sorted by name index.

    Immutable; the hash and the deterministic sort key are precomputed so
    that memo tables and system ordering stay cheap.
    """

    __slots__ = ("coeffs", "rel", "sort_key", "_hash")

    def __init__(self, coeffs: tuple, rel: str):
        self.coeffs = coeffs  # ((Atom, Fraction != 0), ...) by atom index
        self.rel = rel  # LT, LE, or EQ
        self.sort_key = (rel, tuple((a.index, c) for a, c in coeffs))
        self._hash = hash((coeffs, rel))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (isinstance(other, LinAtom) and self._hash == other._hash
                and self.rel == other.rel and self.coeffs == other.coeffs)

    def coeff_of(self, name: Atom) -> Fraction:
        for atom, c in self.coeffs:
            if atom is name or atom == name:
                return c
        return Fraction(0)

    def names(self) -> tuple:
        return tuple(a for a, _ in self.coeffs)

    def constant_truth(self) -> Optional[bool]:
        """Truth value if no name besides the unit occurs, else None."""
        value = Fraction(0)
        for atom, c in self.coeffs:
            if atom is not UNIT:
                return None
            value = c
        return comm.holds(value, self.rel, Fraction(0))

    def __repr__(self) -> str:
        return f"LinAtom({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return f"0 {self.rel} 0"
        parts = " + ".join(f"{c}*{a.label}" for a, c in self.coeffs)
        return f"{parts} {self.rel} 0"


def lin_atom(coeffs: dict, rel: str) -> LinAtom:
    """Build a canonical atom: zero coefficients dropped, scaled to lead 1."""
    if rel not in (LT, LE, EQ):
        raise ValueError(f"linear atoms use < <= =, got {rel!r}")
    items = sorted(((a, Fraction(c)) for a, c in coeffs.items() if c != 0),
                   key=lambda kv: kv[0].index)
    if items:
        lead = items[0][1]
        scale = abs(lead) if rel != EQ else lead
        items = [(a, c / scale) for a, c in items]
    return LinAtom(tuple(items), rel)


_from_comm_memo: dict = {}


def from_comm(atom: CommAtom) -> LinAtom:
    """Translate ``lhs REL coeff*rhs`` into a linear atom."""
    cached = _from_comm_memo.get(atom)
    if cached is not None:
        return cached
    if atom.rel in (LT, LE, EQ):
        made = lin_atom({atom.lhs: 1, atom.rhs: -atom.coeff}, atom.rel)
    else:
        flipped = LT if atom.rel == GT else LE
        made = lin_atom({atom.lhs: -1, atom.rhs: atom.coeff}, flipped)
    _from_comm_memo[atom] = made
    return made


def make_system(atoms: Iterable[LinAtom]) -> tuple:
    """Deduplicate, drop trivially true atoms, sort deterministically."""
    kept = {}
    for a in atoms:
        truth = a.constant_truth()
        if truth is True:
            continue
        kept[a] = None
    return tuple(sorted(kept, key=_sort_key))


def _sort_key(a: LinAtom):
    return a.sort_key


def _linear_combination(a: LinAtom, ca: Fraction, b: LinAtom, cb: Fraction,
                        rel: str) -> LinAtom:
    # Merge the two index-sorted coefficient lists directly.
    items = []
    left, right = a.coeffs, b.coeffs
    i = j = 0
    while i < len(left) and j < len(right):
        la, lc = left[i]
        ra, rc = right[j]
        if la is ra or la == ra:
            value = ca * lc + cb * rc
            if value != 0:
                items.append((la, value))
            i += 1
            j += 1
        elif la.index < ra.index:
            items.append((la, ca * lc))
            i += 1
        else:
            items.append((ra, cb * rc))
            j += 1
    for atom, c in left[i:]:
        items.append((atom, ca * c))
    for atom, c in right[j:]:
        items.append((atom, cb * c))
    if items:
        lead = items[0][1]
        scale = abs(lead) if rel != EQ else lead
        if scale != 1:
            items = [(atom, c / scale) for atom, c in items]
    return LinAtom(tuple(items), rel)


def _substitute(target: LinAtom, eq: LinAtom, name: Atom) -> LinAtom:
    cx = target.coeff_of(name)
    if cx == 0:
        return target
    ex = eq.coeff_of(name)
    return _linear_combination(target, Fraction(1), eq, -cx / ex, target.rel)


def _drop_subsumed(system: Sequence[LinAtom]) -> tuple:
    """Keep only the strongest bound per scaled direction vector."""
    best: dict = {}
    passthrough = []
    order = []
    for a in system:
        if a.rel == EQ:
            passthrough.append(a)
            continue
        var_part = tuple((atom, c) for atom, c in a.coeffs if atom is not UNIT)
        if not var_part:
            passthrough.append(a)  # constant verdicts stay visible
            continue
        lead = abs(var_part[0][1])
        key = tuple((atom, c / lead) for atom, c in var_part)
        bound = a.coeff_of(UNIT) / lead
        prev = best.get(key)
        # Constraint reads: key-combination REL -bound.  Larger bound is
        # stronger; on a tie the strict atom wins.
        if prev is None:
            best[key] = (bound, a.rel == LT, a)
            order.append(key)
        else:
            pb, pstrict, _ = prev
            strict = a.rel == LT
            if bound > pb or (bound == pb and strict and not pstrict):
                best[key] = (bound, strict, a)
    kept = passthrough + [best[k][2] for k in order]
    return make_system(kept)


_fm_memo: dict = {}
_infeasible_memo: dict = {}
_implies_memo: dict = {}


def clear_caches() -> None:
    _fm_memo.clear()
    _infeasible_memo.clear()
    _implies_memo.clear()


def _as_key(system: Sequence[LinAtom]) -> tuple:
    return system if isinstance(system, tuple) else tuple(system)


def fm_eliminate(system: Sequence[LinAtom], name: Atom,
                 cap: int = ATOM_CAP) -> tuple:
    """Exact projection of the system onto the names other than ``name``.

    Memoized: elimination chains that share a prefix (as the all-pairs sweep
    does) reuse each other's work.
    """
    if name is UNIT:
        raise ValueError("the unit name cannot be eliminated")
    key = (_as_key(system), name, cap)
    cached = _fm_memo.get(key)
    if cached is None:
        if len(_fm_memo) > 200_000:
            _fm_memo.clear()
        cached = _fm_core(system, name, cap)
        _fm_memo[key] = cached
    return cached


def _fm_core(system: Sequence[LinAtom], name: Atom, cap: int) -> tuple:
    rest = []
    equalities = []
    lowers = []
    uppers = []
    for a in system:
        c = a.coeff_of(name)
        if c == 0:
            rest.append(a)
        elif a.rel == EQ:
            equalities.append(a)
        elif c > 0:
            uppers.append(a)
        else:
            lowers.append(a)
    if name is UNIT:
        # The unit is positive; make that explicit while projecting it away.
        lowers.append(LinAtom(((UNIT, Fraction(-1)),), LT))
    if equalities:
        eq = equalities[0]
        out = rest + [_substitute(a, eq, name)
                      for a in equalities[1:] + lowers + uppers]
        return _finish(out, cap)
    out = list(rest)
    for low in lowers:
        cl = low.coeff_of(name)
        for up in uppers:
            cu = up.coeff_of(name)
            rel = LT if (low.rel == LT or up.rel == LT) else LE
            out.append(_linear_combination(up, -cl, low, cu, rel))
    return _finish(out, cap)


def _finish(atoms: Sequence[LinAtom], cap: int) -> tuple:
    system = _drop_subsumed(make_system(atoms))
    if len(system) > cap:
        raise ResourceLimitError(f"linear system exceeded {cap} atoms")
    return system


def names_of(system: Sequence[LinAtom]) -> list:
    seen: dict = {}
    for a in system:
        for atom, _ in a.coeffs:
            if atom is not UNIT:
                seen.setdefault(atom, None)
    return list(seen)


def eliminate_all_except(system: Sequence[LinAtom], keep: Iterable[Atom],
                         cap: int = ATOM_CAP) -> tuple:
    """Project onto ``keep`` (plus the unit), fewest-occurrence order first."""
    keep_set = set(keep) | {UNIT}
    current = make_system(system)
    while True:
        counts: dict = {}
        for a in current:
            for atom, _ in a.coeffs:
                if atom not in keep_set:
                    counts[atom] = counts.get(atom, 0) + 1
        if not counts:
            return current
        target = min(counts, key=lambda atom: (counts[atom], atom.index))
        current = fm_eliminate(current, target, cap)


def has_false_constant(system: Sequence[LinAtom]) -> bool:
    return any(a.constant_truth() is False for a in system)


def is_infeasible(system: Sequence[LinAtom], cap: int = ATOM_CAP) -> bool:
    """Exact: true iff the system has no rational (equivalently real) solution."""
    current = make_system(system)
    key = (current, cap)
    cached = _infeasible_memo.get(key)
    if cached is not None:
        return cached
    result = _is_infeasible_core(current, cap)
    if len(_infeasible_memo) > 200_000:
        _infeasible_memo.clear()
    _infeasible_memo[key] = result
    return result


def _is_infeasible_core(current: tuple, cap: int) -> bool:
    if has_false_constant(current):
        return True
    keep_set = {UNIT}
    while True:
        counts: dict = {}
        for a in current:
            for atom, _ in a.coeffs:
                if atom not in keep_set:
                    counts[atom] = counts.get(atom, 0) + 1
        if not counts:
            return has_false_constant(current)
        target = min(counts, key=lambda atom: (counts[atom], atom.index))
        current = fm_eliminate(current, target, cap)
        if has_false_constant(current):
            return True


def implies(system: Sequence[LinAtom], atom: CommAtom,
            cap: int = ATOM_CAP) -> bool:
    """Entailment check: the negation of ``atom`` must be infeasible."""
    base = make_system(system)
    key = (base, atom, cap)
    cached = _implies_memo.get(key)
    if cached is not None:
        return cached
    result = True
    for disjunct in comm.negations(atom):
        if disjunct is False:
            continue
        if disjunct is True:
            if not is_infeasible(base, cap):
                result = False
                break
            continue
        if not is_infeasible(base + (from_comm(disjunct),), cap):
            result = False
            break
    if len(_implies_memo) > 200_000:
        _implies_memo.clear()
    _implies_memo[key] = result
    return result


def _contradiction_pair(v: Atom) -> list:
    anchor = v if v is not UNIT else UNIT
    if anchor is UNIT:
        # No ordinary name involved; the constant falsehood suffices.
        return [make_atom(UNIT, LT, Fraction(1), UNIT)]
    low = make_atom(anchor, LT, Fraction(0), UNIT)
    high = make_atom(anchor, GT, Fraction(0), UNIT)
    return [a for a in (low, high) if not isinstance(a, bool)]


def _atoms_from_two_names(system: Sequence[LinAtom], u: Atom, v: Atom) -> list:
    """Read ``alpha*u + beta*v REL 0`` atoms off as comparison atoms."""
    out = []
    for a in system:
        alpha = a.coeff_of(u)
        beta = a.coeff_of(v)
        if alpha == 0 and beta == 0:
            continue
        if alpha == 0:
            made = make_atom(v, a.rel, Fraction(0), UNIT) if beta > 0 else \
                make_atom(v, comm.mirror(a.rel), Fraction(0), UNIT)
        elif alpha > 0:
            made = make_atom(u, a.rel, -beta / alpha, v)
        else:
            made = make_atom(u, comm.mirror(a.rel), -beta / alpha, v)
        if made is False:
            return None  # the projected system contains a falsehood
        if made is not True:
            out.append(made)
    return out


def _merge_equalities(atoms: list) -> list:
    """Collapse matching <=/>= half-planes into a single equality atom."""
    atoms = list(dict.fromkeys(atoms))
    result = []
    consumed = set()
    for i, a in enumerate(atoms):
        if i in consumed or a.rel != LE:
            continue
        partner = None
        if a.coeff > 0 and a.rhs is not UNIT:
            partner = make_atom(a.rhs, LE, 1 / a.coeff, a.lhs)
        else:
            partner = make_atom(a.lhs, GE, a.coeff, a.rhs)
        if isinstance(partner, bool):
            continue
        for j, b in enumerate(atoms):
            if j != i and j not in consumed and b == partner:
                merged = make_atom(a.lhs, EQ, a.coeff, a.rhs)
                if not isinstance(merged, bool):
                    result.append(merged)
                consumed.add(i)
                consumed.add(j)
                break
    for i, a in enumerate(atoms):
        if i not in consumed:
            result.append(a)
    return result


def _prune_entailed(atoms: list, cap: int) -> list:
    """Drop atoms implied by the remaining ones, in one deterministic pass.

    Each drop is justified by atoms that either survive or are dropped later
    with their own justification, so the final set implies every dropped one.
    """
    kept = list(atoms)
    i = 0
    while i < len(kept):
        others = kept[:i] + kept[i + 1:]
        context = [from_comm(b) for b in others]
        if implies(context, kept[i], cap):
            kept.pop(i)
        else:
            i += 1
    return kept


def project_to_pair(system: Sequence[LinAtom], u: Atom, v: Atom,
                    cap: int = ATOM_CAP) -> list:
    """Strongest comparison atoms between u and v entailed by the system.

    Returns at most two scaled half-planes relating u and v plus at most two
    constant bounds for each of them; an infeasible system yields the
    canonical contradictory pair.
    """
    if u is v:
        raise ValueError("projection needs two distinct names")
    base = make_system(system)
    reduced = eliminate_all_except(base, {u, v}, cap)
    if has_false_constant(reduced) or is_infeasible(reduced, cap):
        return _contradiction_pair(v if v is not UNIT else u)
    collected: list = []
    if u is UNIT or v is UNIT:
        x = v if u is UNIT else u
        got = _atoms_from_two_names(reduced, x, UNIT)
        if got is None:
            return _contradiction_pair(x)
        collected.extend(got)
    else:
        pair_only = _fm_core(reduced, UNIT, cap)
        for source, names in ((pair_only, (u, v)),
                              (fm_eliminate(reduced, v, cap), (u, UNIT)),
                              (fm_eliminate(reduced, u, cap), (v, UNIT))):
            got = _atoms_from_two_names(source, *names)
            if got is None:
                return _contradiction_pair(v)
            collected.extend(got)
    merged = _merge_equalities(collected)
    return _prune_entailed(merged, cap)
