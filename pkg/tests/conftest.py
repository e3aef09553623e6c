"""Shared fixtures: vertex sets are built once per session into a cache.

Set ``NSCAP_TEST_CACHE=DIR`` to reuse a warm cache between runs; by default
everything is rebuilt in a temporary directory.
"""
import os
import time
from pathlib import Path

import pytest

from nscap.data import PAIRS
from nscap.polytope import ALT_CUT_LEVEL, CUT_LEVEL, build_p_out, cut
from nscap.relabel import ORBIT_KINDS, ns_union, orbit


def pytest_addoption(parser):
    parser.addoption("--long", action="store_true", default=False,
                     help="run the hours-scale full no-signaling enumeration")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long"):
        return
    skip = pytest.mark.skip(reason="long tier: pass --long to run")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


# acceptance lines are collected here and printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (len(k), k)):
        for line in ACCEPTANCE[key]:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    env = os.environ.get("NSCAP_TEST_CACHE")
    if env:
        path = Path(env)
        path.mkdir(parents=True, exist_ok=True)
        return path
    return tmp_path_factory.mktemp("nscap-cache")


@pytest.fixture(scope="session")
def orbit_build(cache_dir):
    """``(orbits, seconds, all_cached)`` for the four orbit kinds."""
    start = time.perf_counter()
    out, cached = {}, []
    for kind in ORBIT_KINDS:
        out[kind], hit = orbit(kind, cache_dir)
        cached.append(hit)
    return out, time.perf_counter() - start, all(cached)


@pytest.fixture(scope="session")
def orbits(orbit_build):
    return orbit_build[0]


@pytest.fixture(scope="session")
def local_set(orbits):
    return orbits["local"]


@pytest.fixture(scope="session")
def union(orbits, cache_dir):
    return ns_union(cache_dir)


def _build_pout(orbits, cache_dir, level):
    cuts, seconds = {}, {}
    for pair in PAIRS:
        res, hit = cut(*pair, cache_dir=cache_dir, level=level)
        cuts[pair] = res
        seconds[pair] = None if hit else res.seconds
    vs, audit = build_p_out(orbits, cuts, level)
    return vs, audit, cuts, seconds


@pytest.fixture(scope="session")
def pout_build(orbits, cache_dir):
    """``(P_out, audit, cuts, cut seconds)`` at the default level 7/2."""
    return _build_pout(orbits, cache_dir, CUT_LEVEL)


@pytest.fixture(scope="session")
def pout_alt_build(orbits, cache_dir):
    """The same at the alternative level 18/5."""
    return _build_pout(orbits, cache_dir, ALT_CUT_LEVEL)


@pytest.fixture(scope="session")
def cuts(pout_build):
    return pout_build[2]


@pytest.fixture(scope="session")
def b4_orbit():
    from nscap.bell import generate_equivalent_inequalities
    return generate_equivalent_inequalities()


@pytest.fixture(scope="session")
def pairs():
    return PAIRS


@pytest.fixture(scope="session")
def acceptance():
    """Record one PASS/FAIL line (plus optional notes) per criterion, then assert."""
    def record(key, ok, detail, notes=()):
        ACCEPTANCE[key] = [f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}"]
        ACCEPTANCE[key] += [f"    note: {n}" for n in notes]
        assert ok, detail
    return record
