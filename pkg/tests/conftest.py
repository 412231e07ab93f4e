import random
from collections import deque
from pathlib import Path

import pytest

from upto.lattice import Carrier
from upto.semirings import get_semiring
from upto.weighted import Vec, WAut

ROOT = Path(__file__).resolve().parent.parent
INPUTS = ROOT / "inputs"


@pytest.fixture
def inputs():
    return INPUTS


def random_nfa(rng: random.Random, n: int, letters=("a", "b"), density: float = 0.3) -> WAut:
    b = get_semiring("bool")
    trans = {}
    for x in range(n):
        for a in letters:
            succ = {y for y in range(n) if rng.random() < density}
            if succ:
                trans[(x, a)] = Vec.of_set(succ)
    out = tuple(rng.random() < 0.4 for _ in range(n))
    return WAut(Carrier(n, tuple(f"s{i}" for i in range(n))), tuple(letters), b, out, trans)


def subset_oracle(aut: WAut, u, v, relation=lambda a, b: a == b):
    """Explore the determinised product exhaustively; True iff every reached pair satisfies ``relation``."""
    def step(s, a):
        return frozenset(y for x in s for y, _ in aut.trans.get((x, a), Vec(())).items)

    def out(s):
        return any(aut.out[x] for x in s)

    start = (frozenset(u), frozenset(v))
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        if not relation(out(x), out(y)):
            return False
        for a in aut.alphabet:
            nxt = (step(x, a), step(y, a))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
