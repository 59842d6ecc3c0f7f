"""Raw generate-and-filter oracle for closed-term counts.

Every AST over the whole term language up to a small size, kept when the
kernel accepts it.  Independent of the enumeration grammar.
"""

import functools
import itertools

from mltt import syntax as S
from mltt.kernel import TypeCheckError, check


def _classes():
    out, todo = set(), [S.Term]
    while todo:
        for c in todo.pop().__subclasses__():
            if c not in out:
                out.add(c)
                todo.append(c)
    keep = (c for c in out if getattr(S, c.__name__, None) is c and c not in (S.Const, S.EMap))
    return sorted(keep, key=lambda c: c.__name__)


CLASSES = _classes()


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@functools.lru_cache(maxsize=None)
def raw_terms(size, depth):
    out = []
    for cls in CLASSES:
        if cls is S.Var:
            if size == 1:
                out.extend(S.Var(i) for i in range(depth))
            continue
        if cls is S.Universe:
            if size == 1:
                out.append(S.Universe(0))
            continue
        binders = [k for _, k in cls._spec]
        if len(binders) + 1 > size:
            continue
        for sizes in _compositions(size - 1, len(binders)):
            pools = [raw_terms(n, depth + k) for n, k in zip(sizes, binders)]
            out.extend(cls(*args) for args in itertools.product(*pools))
    return tuple(out)


def raw_count(ty, size):
    n = 0
    for t in raw_terms(size, 0):
        try:
            check((), t, ty)
        except TypeCheckError:
            continue
        n += 1
    return n
