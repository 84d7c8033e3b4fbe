"""Independent coset enumeration used only as a test oracle.

Classic relator-scanning enumeration over the presentation whose generators
are the nonidentity factor elements and whose relators are the factor
multiplication triples.  Shares no code with the package's fold/saturate
builder, so agreement between the two is meaningful evidence.
"""

from __future__ import annotations


class EnumerationOverflow(Exception):
    pass


class NaiveCosetTable:
    def __init__(self, system, gens, max_cosets=64):
        self.system = system
        self.max_cosets = max_cosets
        self.letters = [
            (lam, g)
            for lam in range(system.num_factors)
            for g in range(1, system.factors_g[lam].order)
        ]
        self.relators = self._relators()
        self.gen_words = [list(w) for w in gens]
        self.table = [dict()]
        self.parent = [0]
        self._run()

    def _relators(self):
        rels = []
        for lam in range(self.system.num_factors):
            group = self.system.factors_g[lam]
            for g in range(1, group.order):
                for h in range(1, group.order):
                    gh = group.mul[g][h]
                    if gh == 0:
                        rels.append([(lam, g), (lam, h)])
                    else:
                        rels.append([(lam, g), (lam, h), (lam, group.inv[gh])])
        return rels

    def _inv(self, letter):
        lam, g = letter
        return (lam, self.system.factors_g[lam].inv[g])

    def rep(self, c):
        while self.parent[c] != c:
            self.parent[c], c = self.parent[self.parent[c]], self.parent[c]
        return c

    def _live(self):
        return [c for c in range(len(self.table)) if self.rep(c) == c]

    def _get(self, c, letter):
        t = self.table[c].get(letter)
        return None if t is None else self.rep(t)

    def _set(self, c, letter, d):
        self.table[c][letter] = d
        self.table[d][self._inv(letter)] = c

    def _new_coset(self):
        if len(self._live()) >= self.max_cosets:
            raise EnumerationOverflow(self.max_cosets)
        c = len(self.table)
        self.table.append(dict())
        self.parent.append(c)
        return c

    def _coincide(self, a, b):
        queue = [(a, b)]
        while queue:
            a, b = queue.pop()
            a, b = self.rep(a), self.rep(b)
            if a == b:
                continue
            keep, drop = (a, b) if a < b else (b, a)
            self.parent[drop] = keep
            row = self.table[drop]
            self.table[drop] = dict()
            for letter, t in row.items():
                t = self.rep(t)
                cur = self._get(keep, letter)
                if cur is None:
                    self._set(keep, letter, t)
                elif cur != t:
                    queue.append((cur, t))

    def _scan(self, start, word):
        # forward as far as defined, then backward; deduce or coincide
        changed = False
        f, i = self.rep(start), 0
        while i < len(word):
            t = self._get(f, word[i])
            if t is None:
                break
            f, i = t, i + 1
        if i == len(word):
            if f != self.rep(start):
                self._coincide(f, self.rep(start))
                return True
            return False
        b, j = self.rep(start), len(word) - 1
        while j > i:
            t = self._get(b, self._inv(word[j]))
            if t is None:
                break
            b, j = t, j - 1
        if j == i:
            f, b = self.rep(f), self.rep(b)
            existing = self._get(b, self._inv(word[i]))
            if existing is not None and existing != f:
                self._coincide(existing, f)
            else:
                self._set(f, word[i], b)
            return True
        # gap longer than one letter: define the next coset on the path
        c = self._new_coset()
        self._set(self.rep(f), word[i], c)
        return True

    def _run(self):
        while True:
            changed = False
            for w in self.gen_words:
                if w:
                    changed |= self._scan(0, w)
            for c in self._live():
                if self.rep(c) != c:
                    continue
                for rel in self.relators:
                    changed |= self._scan(c, rel)
                    if self.rep(c) != c:
                        break
            if changed:
                continue
            hole = None
            for c in self._live():
                for letter in self.letters:
                    if self._get(c, letter) is None:
                        hole = (c, letter)
                        break
                if hole:
                    break
            if hole is None:
                return
            c, letter = hole
            d = self._new_coset()
            self._set(c, letter, d)

    @property
    def size(self):
        return len(self._live())

    def membership(self, word):
        c = 0
        for letter in word:
            c = self._get(self.rep(c), letter)
            if c is None:
                return False
        return self.rep(c) == 0
