"""Brute-force oracles used by the tests only.

Everything here enumerates exhaustively and is meant for graphs and groups
small enough to list completely.
"""
import itertools
from collections import Counter, deque
from typing import Iterable, List, Sequence, Set, Tuple

UNDEFINED = 0xFF


def compose_codes(a: bytes, b: bytes) -> bytes:
    """x -> b(a(x)) for (partial) permutation codes, written out pointwise."""
    out = bytearray(len(a))
    for x, y in enumerate(a):
        out[x] = UNDEFINED if y == UNDEFINED else b[y]
    return bytes(out)


def invert(code: bytes) -> bytes:
    out = bytearray([UNDEFINED]) * len(code)
    for x, y in enumerate(code):
        if y != UNDEFINED:
            out[y] = x
    return bytes(out)


def group_closure(codes: Iterable[bytes], degree: int) -> Set[bytes]:
    """All products of the generators, identity included."""
    codes = list(codes)
    identity = bytes(range(degree))
    seen = {identity}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for g in codes:
            image = compose_codes(current, g)
            if image not in seen:
                seen.add(image)
                queue.append(image)
    return seen


def semigroup_closure(codes: Iterable[bytes]) -> Set[bytes]:
    """Closure of generators and their inverses under composition."""
    gens = set()
    for code in codes:
        gens.add(code)
        gens.add(invert(code))
    seen = set(gens)
    queue = deque(gens)
    while queue:
        current = queue.popleft()
        for g in gens:
            image = compose_codes(current, g)
            if image not in seen:
                seen.add(image)
                queue.append(image)
    return seen


def _labels(graph) -> Tuple[Sequence[str], List[List[tuple]]]:
    n = graph.n
    labels = [[None if a == b else graph.edge_label(a, b) for b in range(n)] for a in range(n)]
    return graph.types, labels


def brute_force_automorphisms(graph) -> Set[bytes]:
    types, labels = _labels(graph)
    n = graph.n
    found = set()
    for image in itertools.permutations(range(n)):
        if any(types[v] != types[image[v]] for v in range(n)):
            continue
        if all(labels[a][b] == labels[image[a]][image[b]] for a in range(n) for b in range(a + 1, n)):
            found.add(bytes(image))
    return found


def brute_force_isomorphic(first, second) -> bool:
    """True when some bijection carries types and edge labels of ``first`` onto ``second``."""
    if first.n != second.n:
        return False
    types_a, labels_a = _labels(first)
    types_b, labels_b = _labels(second)
    n = first.n
    for image in itertools.permutations(range(n)):
        if any(types_a[v] != types_b[image[v]] for v in range(n)):
            continue
        if all(labels_a[a][b] == labels_b[image[a]][image[b]] for a in range(n) for b in range(a + 1, n)):
            return True
    return False


def all_partial_permutations(n: int):
    for size in range(n + 1):
        for domain in itertools.combinations(range(n), size):
            for images in itertools.permutations(range(n), size):
                code = bytearray([UNDEFINED]) * n
                for x, y in zip(domain, images):
                    code[x] = y
                yield bytes(code)


def brute_force_partial_automorphisms(graph) -> Set[bytes]:
    types, labels = _labels(graph)
    found = set()
    for code in all_partial_permutations(graph.n):
        pairs = [(x, y) for x, y in enumerate(code) if y != UNDEFINED]
        if any(types[x] != types[y] for x, y in pairs):
            continue
        if all(labels[a][b] == labels[fa][fb] for (a, fa), (b, fb) in itertools.combinations(pairs, 2)):
            found.add(code)
    return found


def grid_permutation(rows: int, cols: int, move) -> List[int]:
    """Image array of a grid transformation ``move(r, c) -> (r', c')`` on row-major indices."""
    image = [0] * (rows * cols)
    for r in range(rows):
        for c in range(cols):
            r2, c2 = move(r, c)
            image[r * cols + c] = r2 * cols + c2
    return image


def count_task_symmetries(task_graph) -> int:
    """Channel-preserving task permutations, by backtracking with degree signatures."""
    s = task_graph.size
    between = Counter((c.source, c.target, c.volume) for c in task_graph.channels)
    pair_volumes = {}
    for (a, b, volume), count in between.items():
        pair_volumes.setdefault((a, b), Counter())[volume] += count

    def signature(task: int):
        incoming = sorted(c.volume for c in task_graph.channels if c.target == task)
        outgoing = sorted(c.volume for c in task_graph.channels if c.source == task)
        return tuple(incoming), tuple(outgoing)

    signatures = [signature(t) for t in range(s)]
    image = [-1] * s
    used = [False] * s

    def consistent(task: int) -> bool:
        for other in range(task + 1):
            for a, b in ((task, other), (other, task)):
                if pair_volumes.get((a, b), Counter()) != pair_volumes.get((image[a], image[b]), Counter()):
                    return False
        return True

    def extend(task: int) -> int:
        if task == s:
            return 1
        total = 0
        for candidate in range(s):
            if used[candidate] or signatures[candidate] != signatures[task]:
                continue
            image[task] = candidate
            used[candidate] = True
            if consistent(task):
                total += extend(task + 1)
            used[candidate] = False
            image[task] = -1
        return total

    return extend(0)
