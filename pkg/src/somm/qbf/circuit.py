"""Hash-consed boolean circuits with quantifier nodes at any depth.

A literal is a non-zero int: ``+i`` is node ``i``, ``-i`` its negation.  Node 1
is the constant true, so ``TRUE == 1`` and ``FALSE == -1``.  Node kinds are
``VAR``, ``AND``, ``OR``, ``EXISTS`` and ``FORALL``; gates are simplified on
construction (constant folding, duplicate and complement elimination,
single-child collapse) and structurally identical gates share one node.

Each quantifier node binds variables that no other quantifier node binds.
"""

from __future__ import annotations

from dataclasses import dataclass

CONST, VAR, AND, OR, EXISTS, FORALL = range(6)
KIND_NAMES = ("const", "var", "and", "or", "exists", "forall")
TRUE, FALSE = 1, -1


@dataclass(frozen=True)
class VarOrigin:
    """Where a boolean variable comes from: a set variable and one tuple."""

    name: str
    tuple: tuple = ()

    def __str__(self):
        return f"{self.name}({','.join(map(str, self.tuple))})" if self.tuple else self.name


class Circuit:
    def __init__(self):
        self.kind = [None, CONST]
        self.args: list = [None, ()]
        self.bound: list = [None, ()]  # quantified variables, for quantifier nodes
        self.origin: dict = {}
        self._table: dict = {}
        self._support: dict = {}

    def __len__(self):
        return len(self.kind) - 1

    # -- construction -------------------------------------------------------------

    def _intern(self, key, kind, args, bound=()):
        node = self._table.get(key)
        if node is None:
            node = len(self.kind)
            self.kind.append(kind)
            self.args.append(args)
            self.bound.append(bound)
            self._table[key] = node
        return node

    def var(self, origin=None) -> int:
        node = len(self.kind)
        self.kind.append(VAR)
        self.args.append(())
        self.bound.append(())
        if origin is not None:
            self.origin[node] = origin
        return node

    def and2(self, a: int, b: int) -> int:
        if a == TRUE or a == b:
            return b
        if b == TRUE:
            return a
        if a == FALSE or b == FALSE or a == -b:
            return FALSE
        args = (a, b) if a < b else (b, a)
        node = self._table.get((AND, args))
        return node if node is not None else self._intern((AND, args), AND, args)

    def and_(self, lits) -> int:
        if type(lits) in (list, tuple) and len(lits) == 2:
            return self.and2(lits[0], lits[1])
        seen = set()
        for lit in lits:
            if lit == TRUE:
                continue
            if lit == FALSE or -lit in seen:
                return FALSE
            seen.add(lit)
        if not seen:
            return TRUE
        if len(seen) == 1:
            return next(iter(seen))
        args = tuple(sorted(seen))
        return self._intern((AND, args), AND, args)

    def or_(self, lits) -> int:
        seen = set()
        for lit in lits:
            if lit == FALSE:
                continue
            if lit == TRUE or -lit in seen:
                return TRUE
            seen.add(lit)
        if not seen:
            return FALSE
        if len(seen) == 1:
            return next(iter(seen))
        args = tuple(sorted(seen))
        return self._intern((OR, args), OR, args)

    def implies(self, a: int, b: int) -> int:
        return self.or_((-a, b))

    def iff(self, a: int, b: int) -> int:
        if a == b:
            return TRUE
        if a == -b:
            return FALSE
        return self.or_((self.and_((a, b)), self.and_((-a, -b))))

    def _quant(self, kind, variables, body: int) -> int:
        if abs(body) == 1 or not variables:
            return body
        variables = tuple(variables)
        key = (kind, variables, body)
        return self._intern(key, kind, (body,), variables)

    def exists(self, variables, body: int) -> int:
        return self._quant(EXISTS, variables, body)

    def forall(self, variables, body: int) -> int:
        return self._quant(FORALL, variables, body)

    # -- inspection -----------------------------------------------------------------

    def is_var(self, lit: int) -> bool:
        return self.kind[abs(lit)] == VAR

    def children(self, node: int) -> tuple:
        return self.args[node]

    def reachable(self, root: int) -> list:
        """Nodes reachable from ``root``, children before parents."""
        seen = bytearray(len(self.kind))
        args = self.args
        order = []
        stack = [abs(root)]
        while stack:
            node = stack.pop()
            if node < 0:
                order.append(-node)
                continue
            if seen[node]:
                continue
            seen[node] = 1
            stack.append(-node)  # completion marker
            for c in args[node]:
                if c < 0:
                    c = -c
                if not seen[c]:
                    stack.append(c)
        return order

    def stats(self, root: int) -> dict:
        nodes = self.reachable(root)
        counts = {name: 0 for name in KIND_NAMES}
        bound = 0
        for n in nodes:
            counts[KIND_NAMES[self.kind[n]]] += 1
            bound += len(self.bound[n])
        counts["bound_vars"] = bound
        return counts

    def quantifier_kinds(self, root: int) -> set:
        """Quantifier kinds under the negation-normal reading of ``root``."""
        out = set()
        for node, positive in self.polarities(root):
            k = self.kind[node]
            if k in (EXISTS, FORALL):
                out.add(k if positive else (FORALL if k == EXISTS else EXISTS))
        return out

    def polarities(self, root: int):
        """All (node, polarity) pairs reachable from ``root`` in negation-normal reading."""
        seen = set()
        stack = [root]
        while stack:
            lit = stack.pop()
            key = (abs(lit), lit > 0)
            if key in seen:
                continue
            seen.add(key)
            sign = 1 if lit > 0 else -1
            for c in self.args[abs(lit)]:
                stack.append(sign * c)
        return seen

    def free_vars(self, root: int) -> set:
        """Variables occurring in ``root`` that no enclosing quantifier of ``root`` binds."""
        memo: dict = {}
        for node in self.reachable(root):
            k = self.kind[node]
            if k == VAR:
                memo[node] = frozenset((node,))
            elif k == CONST:
                memo[node] = frozenset()
            else:
                s = frozenset().union(*(memo[abs(c)] for c in self.args[node]))
                if k in (EXISTS, FORALL):
                    s = s - frozenset(self.bound[node])
                memo[node] = s
        return set(memo[abs(root)])

    def support(self, node: int) -> frozenset:
        """Free variables of ``node``, cached per node."""
        cache = self._support
        hit = cache.get(node)
        if hit is not None:
            return hit
        stack = [(node, False)]
        while stack:
            n, ready = stack.pop()
            if n in cache:
                continue
            k = self.kind[n]
            if k == VAR:
                cache[n] = frozenset((n,))
                continue
            if k == CONST:
                cache[n] = _NO_VARS
                continue
            if not ready:
                stack.append((n, True))
                stack.extend((abs(a), False) for a in self.args[n] if abs(a) not in cache)
                continue
            kids = [cache[abs(a)] for a in self.args[n]]
            big = max(kids, key=len)
            s = big.union(*kids)
            if k in (EXISTS, FORALL):
                s = s.difference(self.bound[n])
            # share the child's set when nothing was added, to save memory
            cache[n] = big if s == big else s
        return cache[node]

    # -- rewriting ------------------------------------------------------------------

    def substitute(self, root: int, subst: dict) -> int:
        """Replace free variables by literals (or constants) under ``subst``.

        Quantifier nodes whose body changes get freshly renamed variables, so
        the result never shares binders with ``root`` unless it is unchanged.
        """
        if not subst:
            return root
        top = _Scope(None, dict(subst))
        res = self._subst_in(abs(root), top)
        return res if root > 0 else -res

    def _subst_in(self, root: int, top: "_Scope") -> int:
        support = self.support

        def scope_for(node, scope):
            # the innermost scope that actually changes ``node``
            fv = support(node)
            while scope.parent is not None and scope.own.isdisjoint(fv):
                scope = scope.parent
            return scope

        start = scope_for(root, top)
        stack = [(root, start, False)]
        while stack:
            node, scope, ready = stack.pop()
            memo = scope.memo
            if node in memo:
                continue
            k = self.kind[node]
            if k == CONST or scope.keys.isdisjoint(support(node)):
                memo[node] = node
                continue
            if k == VAR:
                memo[node] = scope.lookup(node)
                continue
            if k in (EXISTS, FORALL):
                inner = scope.children.get(node)
                if inner is None:
                    # rename binders to keep them unique
                    fresh = {v: self.var(self.origin.get(v)) for v in self.bound[node]}
                    inner = scope.children[node] = _Scope(scope, fresh)
                body = self.args[node][0]
                bs = scope_for(abs(body), inner)
                if abs(body) not in bs.memo:
                    stack.append((node, scope, True))
                    stack.append((abs(body), bs, False))
                    continue
                new_body = bs.memo[abs(body)] * (1 if body > 0 else -1)
                memo[node] = self._quant(k, tuple(inner.own_map[v] for v in self.bound[node]), new_body)
                continue
            args = self.args[node]
            kid_scopes = [scope_for(abs(a), scope) for a in args]
            if not ready:
                missing = [(abs(a), ks, False) for a, ks in zip(args, kid_scopes) if abs(a) not in ks.memo]
                if missing:
                    stack.append((node, scope, True))
                    stack.extend(missing)
                    continue
            new = [ks.memo[abs(a)] * (1 if a > 0 else -1) for a, ks in zip(args, kid_scopes)]
            memo[node] = self.and_(new) if k == AND else self.or_(new)
        return start.memo[root]


_NO_VARS: frozenset = frozenset()


class _Scope:
    """Substitution in force below some renamed quantifier nodes."""

    __slots__ = ("parent", "own_map", "own", "keys", "memo", "children")

    def __init__(self, parent, own_map: dict):
        self.parent = parent
        self.own_map = own_map
        self.own = frozenset(own_map)
        self.keys = self.own if parent is None else self.own | parent.keys
        self.memo: dict = {}
        self.children: dict = {}

    def lookup(self, var: int) -> int:
        scope = self
        while scope is not None:
            if var in scope.own_map:
                return scope.own_map[var]
            scope = scope.parent
        return var
