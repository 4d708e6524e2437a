"""Exact optimal values of small MDPX models, independent of the C++ code.

Usage: exact_values.py <kind> <model.mdpx> [goal ...]

Prints one fraction (or "inf") per state. Probabilities and rewards are read
with Fraction(...).limit_denominator(10**6), which recovers the k/d values the
generators emit. Used to freeze the reference values in the unit tests.
"""

import itertools
import sys
from fractions import Fraction


def parse(path):
    states, labels, goals, initial = [], {}, [], None
    for raw in open(path):
        tokens = raw.split("#")[0].split()
        if not tokens:
            continue
        key = tokens[0]
        if key == "state":
            states.append([])
            if len(tokens) == 3:
                labels[tokens[2]] = int(tokens[1])
        elif key == "transition":
            states[-1].append([])
        elif key == "branch":
            p = Fraction(tokens[1]).limit_denominator(10**6)
            r = Fraction(tokens[2]).limit_denominator(10**6)
            states[-1][-1].append((p, r, tokens[3]))
        elif key == "goal":
            goals.extend(tokens[1:])
        elif key == "initial":
            initial = tokens[1]

    def resolve(token):
        return labels[token] if token in labels else int(token)

    model = [[[(p, r, resolve(t)) for p, r, t in tr] for tr in st] for st in states]
    return model, [resolve(g) for g in goals], resolve(initial)


def solve(a, b):
    n = len(b)
    for col in range(n):
        pivot = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[pivot] = a[pivot], a[col]
        b[col], b[pivot] = b[pivot], b[col]
        for row in range(n):
            if row != col and a[row][col] != 0:
                f = a[row][col] / a[col][col]
                a[row] = [x - f * y for x, y in zip(a[row], a[col])]
                b[row] -= f * b[col]
    return [b[i] / a[i][i] for i in range(n)]


def chain_values(chain, goals, probability):
    n = len(chain)

    def closure(seed):
        found = set(seed)
        changed = True
        while changed:
            changed = False
            for s in range(n):
                if s not in found and any(t in found for _, _, t in chain[s]):
                    found.add(s)
                    changed = True
        return found

    reach = closure(goals)
    if probability:
        fail = closure(set(range(n)) - reach - set(goals)) - set(goals)
        unknown = [s for s in range(n) if s in reach and s in fail and s not in goals]
        fixed = {s: Fraction(1) if s in reach else Fraction(0) for s in range(n) if s not in unknown}
    else:
        doomed = closure(set(range(n)) - reach) - set(goals)
        unknown = [s for s in range(n) if s not in doomed and s not in goals]
        fixed = {s: (Fraction(0) if s in goals else None) for s in range(n) if s not in unknown}
    index = {s: i for i, s in enumerate(unknown)}
    a = [[Fraction(int(i == j)) for j in range(len(unknown))] for i in range(len(unknown))]
    b = [Fraction(0)] * len(unknown)
    for s in unknown:
        i = index[s]
        for p, r, t in chain[s]:
            if not probability:
                b[i] += p * r
            if t in index:
                a[i][index[t]] -= p
            elif probability:
                b[i] += p * fixed[t]
    x = solve(a, b) if unknown else []
    return [x[index[s]] if s in index else fixed[s] for s in range(n)]


def optimal(model, goals, kind):
    probability = kind.startswith("p")
    maximize = kind.endswith("max")
    n = len(model)
    absorbing = [[[(Fraction(1), Fraction(0), s)]] if s in goals else model[s] for s in range(n)]
    if probability:
        absorbing = [[[(p, Fraction(0), t) for p, _, t in tr] for tr in st] for st in absorbing]
    best = None
    for choice in itertools.product(*[range(len(st)) for st in absorbing]):
        values = chain_values([absorbing[s][choice[s]] for s in range(n)], set(goals), probability)
        key = [float("inf") if v is None else v for v in values]
        if best is None:
            best = key
        else:
            pick = max if maximize else min
            best = [pick(x, y) for x, y in zip(best, key)]
    return best


if __name__ == "__main__":
    kind, path, *goal_tokens = sys.argv[1:]
    model, declared, _ = parse(path)
    labels = {}
    for raw in open(path):
        tokens = raw.split()
        if tokens[:1] == ["state"] and len(tokens) == 3:
            labels[tokens[2]] = int(tokens[1])
    goals = [labels[g] if g in labels else int(g) for g in goal_tokens] or declared
    print(" ".join(str(v) for v in optimal(model, goals, kind)))
