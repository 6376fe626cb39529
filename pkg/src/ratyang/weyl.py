"""Signed permutations of the row indices and their lifted actions.

The group of signed permutations on m letters shows up three ways: acting
on weight labels, acting on the signed generator pairs of the row Lie
algebra, and acting on the Fock space itself through explicit invertible
operators.  Every lift here is assembled from one-letter building blocks,
so the braid relations can be checked on concrete matrices instead of
assumed.

Words are read right to left: the word (a_1, ..., a_K) names the
composite whose first-applied letter is a_1.  Letters 1..m-1 are the
adjacent transpositions, letter m flips the sign of the last index.
"""

import heapq
from fractions import Fraction

from .fock import row_perm_conjugator, varpi_conjugator
from .linalg import SparseOp
from .liealg import RootData

F1 = Fraction(1)


def mirror_index(c, m):
    """Reverse the index scale: positive c goes to m + 1 - c and the
    negatives follow by oddness."""
    return m + 1 - c if c > 0 else -m - 1 - c


class SignedPerm:
    """A signed permutation, stored as the images of 1..m."""

    __slots__ = ("images",)

    def __init__(self, images):
        self.images = tuple(images)
        if {abs(c) for c in self.images} != set(range(1, len(self.images) + 1)):
            raise ValueError("not a signed permutation")

    @property
    def m(self):
        return len(self.images)

    def __call__(self, c):
        v = self.images[abs(c) - 1]
        return v if c > 0 else -v

    def __eq__(self, other):
        return isinstance(other, SignedPerm) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return "SignedPerm(%r)" % (self.images,)

    @staticmethod
    def identity(m):
        return SignedPerm(range(1, m + 1))

    @staticmethod
    def generator(m, a):
        """Letter a: swap a, a+1 for a < m; negate the last index for a = m."""
        if not 1 <= a <= m:
            raise ValueError("letter out of range")
        images = list(range(1, m + 1))
        if a < m:
            images[a - 1], images[a] = images[a], images[a - 1]
        else:
            images[m - 1] = -m
        return SignedPerm(images)

    def compose(self, other):
        """self applied after other."""
        return SignedPerm(self(other(b)) for b in range(1, self.m + 1))

    def inverse(self):
        images = [0] * self.m
        for b in range(1, self.m + 1):
            v = self.images[b - 1]
            images[abs(v) - 1] = b if v > 0 else -b
        return SignedPerm(images)

    def is_identity(self):
        return self.images == tuple(range(1, self.m + 1))

    def mirrored(self):
        """Conjugate by the index reversal c -> m + 1 - c."""
        m = self.m
        return SignedPerm(
            mirror_index(self(mirror_index(b, m)), m) for b in range(1, m + 1))


def word_to_perm(m, word):
    acc = SignedPerm.identity(m)
    for a in word:
        acc = SignedPerm.generator(m, a).compose(acc)
    return acc


def act_on_labels(perm, labels):
    """Natural action on an m-tuple: entry b picks up the entry at
    |inverse image| with the sign of the inverse image."""
    inv = perm.inverse()
    out = []
    for b in range(1, perm.m + 1):
        c = inv(b)
        v = labels[abs(c) - 1]
        out.append(v if c > 0 else -v)
    return tuple(out)


def shifted_act(perm, labels, flavor):
    """The dot action: shift by the half-sum labels, act, shift back."""
    rho = RootData(perm.m, flavor).rho()
    moved = act_on_labels(
        perm, tuple(x + r for x, r in zip(labels, rho)))
    return tuple(x - r for x, r in zip(moved, rho))


def sign_sequence(perm):
    """Signs picked up by the natural action on the all-plus sequence."""
    inv = perm.inverse()
    return tuple(1 if inv(b) > 0 else -1 for b in range(1, perm.m + 1))


def root_image(perm, root):
    out = [0] * perm.m
    for b, coeff in enumerate(root, start=1):
        if coeff:
            c = perm(b)
            out[abs(c) - 1] += coeff if c > 0 else -coeff
    return tuple(out)


def inversion_set(perm, flavor):
    """Positive roots sent to negative ones.  The flavor decides the
    root list, so the sign-flip letter is invisible in the orth case."""
    return [root for root in RootData(perm.m, flavor).positive_roots()
            if not RootData.is_positive(root_image(perm, root))]


def length(perm, flavor):
    return len(inversion_set(perm, flavor))


_WORD_CACHE = {}


def word_table(m, flavor):
    """Cheapest words for every element, found by a two-best Dijkstra
    walk over the Cayley graph.

    The cost of a word is its letter count, except that the orth flavor
    ranks by the count of letters below m first (the sign flip is free
    there) and total length second.  Ties break on the word itself, so
    the table is deterministic.  Each element keeps its cheapest word
    plus one more: an equal-cost alternative when the flavor counts all
    letters, or an alternative with the same free-letter count and at
    most two extra letters otherwise.
    """
    key = (m, flavor)
    if key not in _WORD_CACHE:
        def cost(word):
            if flavor == "symp":
                return (len(word),)
            return (sum(1 for a in word if a < m), len(word))

        bound = m * m + 3
        found = {}
        heap = [(cost(()), (), SignedPerm.identity(m).images)]
        while heap:
            c, word, images = heapq.heappop(heap)
            lst = found.setdefault(images, [])
            if len(lst) >= 2:
                continue
            lst.append((c, word))
            if len(word) >= bound:
                continue
            perm = SignedPerm(images)
            for a in range(1, m + 1):
                nxt = SignedPerm.generator(m, a).compose(perm)
                nw = word + (a,)
                heapq.heappush(heap, (cost(nw), nw, nxt.images))
        table = {}
        for images, lst in found.items():
            words = [lst[0][1]]
            if len(lst) > 1:
                (c0, w0), (c1, w1) = lst
                if flavor == "symp":
                    ok = c1 == c0
                else:
                    ok = c1[0] == c0[0] and c1[1] <= c0[1] + 2
                if ok:
                    words.append(w1)
            table[images] = tuple(words)
        _WORD_CACHE[key] = table
    return _WORD_CACHE[key]


def reduced_words(perm, flavor):
    """One or two deterministic words realizing the case length."""
    return word_table(perm.m, flavor)[perm.images]


def pair_map_for_letter(m, flavor, a):
    """Image of each signed generator pair under one letter.

    Returns a dict (c, d) -> (coeff, (c', d')).  The letter acts through
    the mirrored index scale; the sign-flip letter attaches a minus for
    each argument equal to +1 in the symp flavor.
    """
    gbar = SignedPerm.generator(m, a).mirrored()
    out = {}
    rng = [c for c in range(-m, m + 1) if c]
    for c in rng:
        for d in rng:
            s = F1
            if a == m and flavor == "symp":
                if (c == 1) != (d == 1):
                    s = -F1
            out[(c, d)] = (s, (gbar(c), gbar(d)))
    return out


def compose_pair_maps(first, second):
    """Apply first, then second."""
    out = {}
    for pair, (s, mid) in first.items():
        s2, img = second[mid]
        out[pair] = (s * s2, img)
    return out


def pair_map_for_word(m, flavor, word):
    acc = {(c, d): (F1, (c, d))
           for c in range(-m, m + 1) if c
           for d in range(-m, m + 1) if d}
    for a in word:
        acc = compose_pair_maps(acc, pair_map_for_letter(m, flavor, a))
    return acc


def defining_conjugator(fm, word):
    """Matrix on C^2m conjugating the defining matrices along the word."""
    dim = 2 * fm.m
    acc = SparseOp.identity(dim)
    for a in word:
        gbar = SignedPerm.generator(fm.m, a).mirrored()
        cols = {}
        for c in fm.indices():
            s = F1
            if a == fm.m and fm.flavor == "symp" and c == 1:
                s = -F1
            cols[fm.idx(c)] = {fm.idx(gbar(c)): s}
        acc = SparseOp(dim, cols) * acc
    return acc


def clifford_letter_operator(a, space, pairing):
    """Fock conjugator for one letter: a row swap below m, the paired
    substitution on row 1 at the sign flip."""
    m = space.nrows
    if a < m:
        lo, hi = m - a, m + 1 - a
        return row_perm_conjugator(space, {lo: hi, hi: lo})
    return varpi_conjugator(space, pairing, {1})


def fill_state(space, signs):
    """Basis state filling every row whose sign is flipped.  Entry a of
    the sign sequence governs row m + 1 - a."""
    m = space.nrows
    state = 0
    for a, s in enumerate(signs, start=1):
        if s < 0:
            state |= space.row_mask(m + 1 - a)
    return state


def clifford_braid_operator(word, space, pairing, signs=None):
    """Composite Fock operator for a word, normalized sector by sector.

    A raw conjugator is only pinned up to a scalar, and for composites
    the scalars need not cancel: different words for the same element
    can come out differing by a sign (moving an odd row past a swap).
    Rescaling each letter so the current flipped-row vacuum maps to the
    next one with coefficient one removes the ambiguity: the result
    depends only on the composed permutation and the starting signs,
    which is what acting on classes modulo the sign ideal demands.
    """
    m = space.nrows
    signs = tuple(signs) if signs is not None else (1,) * m
    acc = SparseOp.identity(space.dim)
    for a in word:
        op = clifford_letter_operator(a, space, pairing)
        nxt = act_on_labels(SignedPerm.generator(m, a), signs)
        image = op.apply({fill_state(space, signs): F1})
        [(state, coeff)] = image.items()
        if state != fill_state(space, nxt):
            raise AssertionError("vacuum tracking lost")
        acc = op.scale(1 / coeff) * acc
        signs = nxt
    return acc
