"""Exact word algebra for the octagon surface group.

Words are strings over the side-pairing alphabet a,b,c,d with capital
letters for inverses.  The single defining relation of the group (the
vertex cycle of the regular octagon with its canonical side pairing) is

    a b A D c d C B = 1.

The relation has piece length 1, so Dehn reduction yields geodesic
words, and two cyclically reduced words represent conjugate elements
exactly when they are related by cyclic rotations and swaps of
subwords equal to half a relator.  Canonical conjugacy keys are the
lexicographic minimum over that closure.
"""

from __future__ import annotations

from functools import lru_cache

ALPHABET = "abcdABCD"
RELATOR = "abADcdCB"

# standard generators g1..g4 with [g1,g2][g3,g4] = 1 as words in the
# side-pairing alphabet
STD_GENS = ("a", "b", "bDB", "bcB")


def inv_letter(ch: str) -> str:
    return ch.swapcase()


def inv_word(w: str) -> str:
    return w[::-1].swapcase()


def free_reduce(w: str) -> str:
    out: list[str] = []
    for ch in w:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def cyc_reduce(w: str) -> str:
    w = free_reduce(w)
    while len(w) > 1 and w[0] == w[-1].swapcase():
        w = w[1:-1]
    return w


def _relator_rotations() -> list[str]:
    rots = []
    for r in (RELATOR, inv_word(RELATOR)):
        for k in range(len(r)):
            rots.append(r[k:] + r[:k])
    return rots


_ROTS = _relator_rotations()

# Dehn replacement table: any subword of length >= 5 matching a relator
# prefix gets replaced by the inverse of the remaining suffix.
_DEHN: dict[str, str] = {}
for _r in _ROTS:
    for _k in range(5, 9):
        _DEHN.setdefault(_r[:_k], inv_word(_r[_k:]))

# half swaps: 4-letter subwords equal (in the group) to the inverse of
# the complementary half of a relator rotation
_HALF: dict[str, str] = {}
for _r in _ROTS:
    _HALF.setdefault(_r[:4], inv_word(_r[4:]))


def dehn_reduce(w: str) -> str:
    """Shorten a word with the relation until no long relator piece is left."""
    w = free_reduce(w)
    changed = True
    while changed:
        changed = False
        for k in range(8, 4, -1):
            if len(w) < k:
                continue
            for i in range(len(w) - k + 1):
                rep = _DEHN.get(w[i : i + k])
                if rep is not None:
                    w = free_reduce(w[:i] + rep + w[i + k :])
                    changed = True
                    break
            if changed:
                break
    return w


def is_identity(w: str) -> bool:
    return dehn_reduce(w) == ""


def equal_words(u: str, v: str) -> bool:
    return is_identity(u + inv_word(v))


def cyc_dehn_reduce(w: str) -> str:
    """Cyclic Dehn reduction: no cyclic subword is more than half a relator."""
    w = cyc_reduce(w)
    changed = True
    while changed and w:
        changed = False
        ww = w + w
        for k in range(8, 4, -1):
            if len(w) < k:
                continue
            for i in range(len(w)):
                rep = _DEHN.get(ww[i : i + k])
                if rep is not None:
                    rot = ww[i : i + len(w)]
                    w = cyc_reduce(rep + rot[k:])
                    changed = True
                    break
            if changed:
                break
    return w


def conjugacy_orbit(w: str) -> set[str]:
    """Closure of a cyclically Dehn-reduced word under rotations and
    half-relator swaps; all members spell the same conjugacy class."""
    seen = {w}
    stack = [w]
    while stack:
        u = stack.pop()
        n = len(u)
        for k in range(1, n):
            r = u[k:] + u[:k]
            if r not in seen:
                seen.add(r)
                stack.append(r)
        uu = u + u
        for i in range(n):
            piece = uu[i : i + 4]
            rep = _HALF.get(piece)
            if rep is not None:
                rot = uu[i : i + n]
                v = cyc_reduce(rep + rot[4:])
                if len(v) == n and v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) > 4096:
            raise RuntimeError(f"conjugacy orbit blow-up for {w!r}")
    return seen


@lru_cache(maxsize=200_000)
def class_key(w: str) -> str:
    """Canonical representative word of the conjugacy class of w."""
    w = cyc_dehn_reduce(w)
    if not w:
        return ""
    return min(conjugacy_orbit(w))


def class_key_with_conjugator(w: str) -> tuple[str, str]:
    """Canonical class word plus a conjugator word p with key = p^-1 w p.

    Half swaps do not change the group element, rotations conjugate by
    the rotated-away prefix; the composite prefix is tracked exactly.
    """
    w0 = free_reduce(w)
    # reduce to cyclically reduced form, tracking the stripped prefix
    pre = ""
    u = w0
    while len(u) > 1 and u[0] == u[-1].swapcase():
        pre += u[0]
        u = u[1:-1]
    # cyclic Dehn reduction conjugates only via rotations; redo it with tracking
    changed = True
    while changed and u:
        changed = False
        uu = u + u
        for k in range(8, 4, -1):
            if len(u) < k:
                continue
            for i in range(len(u)):
                rep = _DEHN.get(uu[i : i + k])
                if rep is not None:
                    pre += u[:i]
                    rot = uu[i : i + len(u)]
                    u2 = rep + rot[k:]
                    # strip new free/cyclic cancellations with tracking
                    u2 = free_reduce(u2)
                    while len(u2) > 1 and u2[0] == u2[-1].swapcase():
                        pre += u2[0]
                        u2 = u2[1:-1]
                    u = u2
                    changed = True
                    break
            if changed:
                break
    if not u:
        return "", free_reduce(pre)
    target = min(conjugacy_orbit(u))
    # search a rotation/swap path from u to target, tracking rotations
    frontier = {u: ""}
    seen = {u}
    while target not in frontier:
        nxt: dict[str, str] = {}
        for v, p in frontier.items():
            n = len(v)
            vv = v + v
            for k in range(1, n):
                r = vv[k : k + n]
                if r not in seen:
                    seen.add(r)
                    nxt[r] = free_reduce(p + v[:k])
            for i in range(n):
                rep = _HALF.get(vv[i : i + 4])
                if rep is not None:
                    r2 = cyc_reduce(rep + vv[i + 4 : i + n])
                    if len(r2) == n and r2 not in seen:
                        seen.add(r2)
                        nxt[r2] = free_reduce(p + v[:i])
        if not nxt:
            raise RuntimeError("canonical form unreachable")
        frontier = nxt
    return target, free_reduce(pre + frontier[target])


def signed_class_key(w: str) -> tuple[str, int]:
    """Orientation-folded key: the smaller of key(w), key(w^-1) with the
    sign recording whether w itself or its reverse is canonical."""
    k1 = class_key(w)
    k2 = class_key(inv_word(w))
    return (k1, 1) if k1 <= k2 else (k2, -1)


def abelianize(w: str):
    """Exponent vector over the standard generators g1..g4 (exact ints).

    In homology a,b,c,d map to g1, g2, g4, -g3 respectively.
    """
    n = [0, 0, 0, 0]
    for ch in w:
        low = ch.lower()
        s = 1 if ch.islower() else -1
        n["abcd".index(low)] += s
    return (n[0], n[1], -n[3], n[2])


def word_of_std(i: int, power: int = 1) -> str:
    """Word of g_{i+1}^power in the side-pairing alphabet."""
    w = STD_GENS[i]
    if power < 0:
        w = inv_word(w)
        power = -power
    return free_reduce(w * power)
