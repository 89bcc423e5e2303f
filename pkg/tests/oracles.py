"""Independent re-derivations used as test oracles.

Nothing here imports the evaluation code it checks; they work from plain
sets and relations.
"""

from itertools import product

from clandestine.formula import Can, Imp, Know, Neg, Var


def relation(game, c):
    """The pairs (w, u) with w ~_C u, from the per-agent blocks."""
    pairs = set()
    for w in game.states:
        for u in game.states:
            if all(any(w in b and u in b for b in game.indist[a]) for a in c):
                pairs.add((w, u))
    return pairs


def classes(game, c):
    rel = relation(game, c)
    return {frozenset(u for u in game.states if (w, u) in rel) for w in game.states}


def truth_table(f):
    """Tautology by itertools.product over the atoms, with a dict valuation."""
    atoms = []

    def collect(g):
        if isinstance(g, Neg):
            collect(g.body)
        elif isinstance(g, Imp):
            collect(g.lhs)
            collect(g.rhs)
        elif g not in atoms:
            atoms.append(g)

    collect(f)

    def ev(g, val):
        if isinstance(g, Neg):
            return not ev(g.body, val)
        if isinstance(g, Imp):
            return not ev(g.lhs, val) or ev(g.rhs, val)
        return val[g]

    return all(ev(f, dict(zip(atoms, bits))) for bits in product((False, True), repeat=len(atoms)))


def is_atom(g):
    return isinstance(g, (Var, Know, Can))


def sat(game, w, f):
    """Satisfaction straight from the definition, over explicit relations."""
    if isinstance(f, Var):
        return w in game.valuation.get(f.name, ())
    if isinstance(f, Neg):
        return not sat(game, w, f.body)
    if isinstance(f, Imp):
        return not sat(game, w, f.lhs) or sat(game, w, f.rhs)
    rel = relation(game, f.coalition)
    if isinstance(f, Know):
        return all(sat(game, u, f.body) for (x, u) in rel if x == w)
    # Can: some nonempty actor C' ⊆ C and op with every outcome block inside the goal
    for t0 in game.closed_mechanism:
        actor, op = t0.coalition, t0.op
        if not actor or not actor <= f.coalition:
            continue
        if all(sat(game, u2, f.body)
               for t in game.closed_mechanism
               if t.coalition == actor and t.op == op and (w, t.source) in rel
               for (x, u2) in rel if x == t.target):
            return True
    return False
