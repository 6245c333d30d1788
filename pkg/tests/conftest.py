from __future__ import annotations

import random
from pathlib import Path

import pytest

from panto.end_periodic import (
    end_behavior,
    fenley_example,
    path_to_preimage,
    phi_star_norm,
    random_ladder_map,
    twisted_slots,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def generated_instances(count=24, max_moves=12, seed=20240501):
    """(f, path) pairs with every curve class twisted, drawn with one and two
    strips and filtered by path length."""
    rng = random.Random(seed)
    out = [(fenley_example(), path_to_preimage(fenley_example()))]
    attempts = 0
    while len(out) < count and attempts < 20 * count:
        attempts += 1
        strips = 1 if attempts % 3 else 2
        f = random_ladder_map(rng, strips, extra=rng.choice([0, 1]))
        order = twisted_slots(f)
        rng.shuffle(order)
        try:
            path = path_to_preimage(f, order=[c for c in order if c in _changed(f)])
        except ValueError:
            path = path_to_preimage(f)
        if len(path.moves) <= max_moves:
            out.append((f, path))
    return out


def _changed(f):
    p = path_to_preimage(f)
    return {m.curve for m in p.moves}


def phi_of(f):
    return phi_star_norm(end_behavior(f))


@pytest.fixture(scope="session")
def instances():
    return generated_instances()


@pytest.fixture
def fenley():
    f = fenley_example()
    return f, path_to_preimage(f)


def cli_run(argv, stdin_text="", env=None):
    """Run the command line in-process; returns (exit code, stdout, stderr)."""
    import contextlib
    import io
    import os
    import sys

    from panto.cli import main

    out, err = io.StringIO(), io.StringIO()
    old_stdin, old_env = sys.stdin, dict(os.environ)
    sys.stdin = io.StringIO(stdin_text)
    if env is not None:
        os.environ.update(env)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(list(argv))
    finally:
        sys.stdin = old_stdin
        os.environ.clear()
        os.environ.update(old_env)
    return code, out.getvalue(), err.getvalue()
