import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shapesent.algebra import Enc, Sort, Var, invk
from shapesent.frontend import parse
from shapesent.homomorphism import Homomorphism
from shapesent.logic import ShapeAnalysis
from shapesent.skeleton import Protocol, Role, make_skeleton, recv, send

FIXTURES = Path(__file__).parent / "fixtures"

# skeleton variables
a, b, b_ = Var("a", Sort.AKEY), Var("b", Sort.AKEY), Var("b'", Sort.AKEY)
s, d = Var("s", Sort.SKEY), Var("d", Sort.DATA)

# role variables live in their own namespace
a0, b0 = Var("a0", Sort.AKEY), Var("b0", Sort.AKEY)
s0, d0 = Var("s0", Sort.SKEY), Var("d0", Sort.DATA)
a1, b1 = Var("a1", Sort.AKEY), Var("b1", Sort.AKEY)
s1, d1 = Var("s1", Sort.SKEY), Var("d1", Sort.DATA)


def blanchet_protocol() -> Protocol:
    init = Role("init", (a0, b0, s0, d0),
                (send(Enc(Enc(s0, invk(a0)), b0)), recv(Enc(d0, s0))))
    resp = Role("resp", (a1, b1, s1, d1),
                (recv(Enc(Enc(s1, invk(a1)), b1)), send(Enc(d1, s1))))
    return Protocol("blanchet", (init, resp))


def blanchet_k0(p=None):
    p = p or blanchet_protocol()
    return make_skeleton(
        p, (a, b, s, d),
        [("resp", 2, {a1: a, b1: b, s1: s, d1: d})],
        non=(invk(a), invk(b)), uniq=(s,))


def blanchet_k1(p=None, init_key=b_, orderings=(((1, 0), (0, 0)),)):
    p = p or blanchet_protocol()
    vs = (a, b, b_, s, d) if init_key == b_ else (a, b, s, d)
    return make_skeleton(
        p, vs,
        [("resp", 2, {a1: a, b1: b, s1: s, d1: d}),
         ("init", 1, {a0: a, b0: init_key, s0: s})],
        orderings=orderings,
        non=(invk(a), invk(b)), uniq=(s,))


@pytest.fixture
def protocol():
    return blanchet_protocol()


@pytest.fixture
def k0(protocol):
    return blanchet_k0(protocol)


@pytest.fixture
def k1(protocol):
    return blanchet_k1(protocol)


@pytest.fixture
def delta1(k0, k1):
    return Homomorphism.create(k0, k1, [0], {a: a, b: b, s: s, d: d})


@pytest.fixture
def analysis(k0, delta1):
    return ShapeAnalysis(k0, (delta1,))


def load(name: str):
    path = FIXTURES / name
    return parse(path.read_text(), str(path))


@pytest.fixture
def blanchet_unit():
    return load("blanchet.scm")


@pytest.fixture
def amended_unit():
    return load("blanchet-amended.scm")


@pytest.fixture
def goal_text():
    return (FIXTURES / "goal.scm").read_text()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
