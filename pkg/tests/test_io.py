import io

import numpy as np
import pytest
from hypothesis import given

from gnets import games, parameter_count
from gnets.cli import main
from gnets.io import (ParseError, bundled, load_game, parse_game, print_game, read_solutions,
                      write_solutions)
from gnets.profile import Profile

from strategies import nets

FIXTURES = ["matching_pennies.gnet", "coordination.gnet", "beer_quiche.gnet"]


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def structure(net):
    return (net.players, [(n.name, n.player, n.domain, n.parents, n.reference, dict(n.available))
                          for n in net.nodes],
            net.uarcs, [(t.player, t.node, t.neighbors, np.asarray(t.weights).tolist()) for t in net.potentials],
            {k: np.asarray(c).tolist() for k, c in net.cpts.items()})


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip(name):
    net = load_game(bundled(name))
    assert structure(parse_game(print_game(net))) == structure(net)


@given(nets())
def test_random_net_round_trip(net):
    assert structure(parse_game(print_game(net))) == structure(net)


def test_bundled_fixtures():
    assert len(load_game(bundled("matching_pennies.gnet")).nodes) == 2
    assert parameter_count(load_game(bundled("beer_quiche.gnet"))) == (8, 16)


def test_fractions_are_exact():
    net = load_game(bundled("coordination.gnet"))
    assert net.potentials[0].weights[1] == 1 / 3


def test_missing_uarc_is_located():
    text = """players 1
node A player=1 domain=a,b
node B player=1 domain=x,y
potential 1 A | B=x : b=2
"""
    with pytest.raises(ParseError) as err:
        parse_game(text)
    assert err.value.line == 4 and "utility arc" in err.value.message


@pytest.mark.parametrize("text,line", [
    ("players 1\nnode A player=2 domain=a,b\n", 2),
    ("players 1\nnode A player=1 domain=a,b\npotential 1 A : b=two\n", 3),
    ("players 1\nnode A player=1 domain=a,b\npotential 1 A : b=2\npotential 1 A : b=3\n", 4),
    ("players 1\nnode A player=1 domain=a,b\nuarc 1 A B\n", 3),
    ("players 1\nnode A player=1 domain=a,b\npotential 1 A : b=2\nnode B player=1 domain=a,b\n", 4),
    ("players 1\nfrobnicate\n", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as err:
        parse_game(text)
    assert err.value.line == line
    assert err.value.col >= 1


def test_solution_round_trip_is_bit_stable():
    net = games.beer_quiche()
    rng = np.random.default_rng(1)
    profs = [games.random_interior_profile(net, rng) for _ in range(3)]
    back = read_solutions(net, write_solutions(net, profs))
    assert all(np.array_equal(a.values, b.values) for a, b in zip(profs, back))


def test_cli_validate_and_info():
    code, out = run(["validate", bundled("beer_quiche.gnet")])
    assert code == 0 and "valid: yes" in out
    code, out = run(["info", bundled("beer_quiche.gnet")])
    assert code == 0
    assert "parameter_count: 8 16" in out and "total_degree: 81" in out


def test_cli_solve_first_matching_pennies(tmp_path):
    sol = tmp_path / "mp.sol"
    code, out = run(["solve-first", bundled("matching_pennies.gnet"), "-o", str(sol)])
    assert code == 0
    probs = [float(line.split()[-1]) for line in out.splitlines() if line.startswith("p ")]
    assert len(probs) == 4 and np.allclose(probs, 0.5, atol=1e-6)
    code, out = run(["verify", bundled("matching_pennies.gnet"), str(sol)])
    assert code == 0 and "record 0: Nash" in out


def test_cli_solve_all_coordination(tmp_path):
    sol = tmp_path / "co.sol"
    code, out = run(["solve-all", bundled("coordination.gnet"), "-o", str(sol)])
    assert code == 0
    kv = dict(line.split(": ", 1) for line in out.splitlines() if line.startswith("paths_"))
    tracked = int(kv.pop("paths_tracked"))
    assert sum(map(int, kv.values())) == tracked
    assert "total_degree: 9" in out and "nash_count: 3" in out
    code, _ = run(["verify", bundled("coordination.gnet"), str(sol)])
    assert code == 0


def test_cli_verify_names_the_violator(tmp_path):
    bad = tmp_path / "bad.sol"
    bad.write_text("record 0\np R A 1\np R B 0\np C A 0\np C B 1\nend\n")
    code, out = run(["verify", bundled("coordination.gnet"), str(bad)])
    assert code == 1
    assert "violation 0: R" in out or "violation 0: C" in out


def test_cli_usage_errors():
    assert run(["frobnicate"])[0] == 64
    assert run([])[0] == 64
    assert run(["solve-all"])[0] == 64


def test_cli_invalid_file(tmp_path):
    f = tmp_path / "broken.gnet"
    f.write_text("players 1\nnode A player=1 domain=a,b\npotential 1 A : b=-1\n")
    code, out = run(["validate", str(f)])
    assert code == 1 and "valid: no" in out


def test_cli_convert_ef(tmp_path):
    dest = tmp_path / "bq.gnet"
    code, out = run(["convert-ef", bundled("beer_quiche.ef"), "-o", str(dest)])
    assert code == 0 and "parameter_count: 8 16" in out
    assert parameter_count(load_game(str(dest))) == (8, 16)


def test_cli_trace_file(tmp_path):
    trace = tmp_path / "trace.txt"
    code, _ = run(["solve-first", bundled("coordination.gnet"), "--trace", str(trace)])
    assert code == 0 and trace.read_text().strip()


def test_cli_is_deterministic():
    for argv in (["solve-first", bundled("beer_quiche.gnet"), "--seed", "2"],
                 ["solve-all", bundled("coordination.gnet"), "--seed", "2"]):
        assert run(argv) == run(argv)
