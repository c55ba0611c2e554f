import numpy as np
import pytest

from risray.geometry import Point2, Segment
from risray.propagation import PropagationParams
from risray.scene import Bounds, Receiver, RisPanel, Role, Scene, Transmitter, Wall, reference_scene


@pytest.fixture(scope="session")
def ref_scene():
    return reference_scene()


@pytest.fixture(scope="session")
def params():
    return PropagationParams()


def random_walls(rng, n, box=10.0):
    walls = []
    while len(walls) < n:
        a = rng.uniform(0, box, 2)
        b = rng.uniform(0, box, 2)
        if np.hypot(*(a - b)) < 0.5:
            continue
        walls.append(Wall(Segment(Point2(*a), Point2(*b)), float(rng.uniform(0, 10))))
    return walls


def random_point_off_walls(rng, walls, box=10.0, clearance=0.05):
    while True:
        p = Point2(*rng.uniform(0.2, box - 0.2, 2))
        if all(w.segment.distance_to(p) > clearance for w in walls):
            return p


def random_ris_scene(rng, n_receivers=1):
    """Box room with a few interior walls and a RIS somewhere inside."""
    W, H = rng.uniform(8, 16), rng.uniform(5, 9)
    P = Point2
    walls = [
        Wall(Segment(P(0, 0), P(W, 0)), 6.0),
        Wall(Segment(P(W, 0), P(W, H)), 6.0),
        Wall(Segment(P(W, H), P(0, H)), 6.0),
        Wall(Segment(P(0, H), P(0, 0)), 6.0),
    ]
    for _ in range(int(rng.integers(0, 2))):
        x = rng.uniform(0.3 * W, 0.6 * W)
        y0 = rng.uniform(0, H / 2)
        walls.append(Wall(Segment(P(x, y0), P(x, y0 + rng.uniform(1, H / 2))), 6.0))
    ris = RisPanel(P(rng.uniform(0.7 * W, 0.9 * W), rng.uniform(0.3 * H, 0.7 * H)), rng.uniform(0.5, 1.5),
                   rng.uniform(0, 180), (-20.0, -10.0, 0.0, 10.0, 20.0), 1.0)
    ris_walls = [ris.wall_at(a) for a in ris.angle_set_deg]

    def free_point():
        while True:
            p = P(rng.uniform(0.3, W - 0.3), rng.uniform(0.3, H - 0.3))
            if all(w.segment.distance_to(p) > 0.1 for w in walls + ris_walls):
                return p

    tx = Transmitter(free_point(), 20.0, 3.5e9)
    receivers = tuple(
        Receiver(chr(ord("A") + k), free_point(), Role.SUBSCRIBER, -60.0) for k in range(n_receivers)
    )
    return Scene(Bounds(0.0, 0.0, W, H), tuple(walls), ris, tx, receivers)


# -- acceptance reporting ---------------------------------------------------
# Tests marked ``acceptance(n, title)`` get one PASS/FAIL line each in the
# terminal summary, whatever the verbosity.

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    n, title = mark.args
    failed = rep.failed
    if rep.when == "call" or failed:
        prev = _acceptance.get(n, (title, True))
        _acceptance[n] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        title, ok = _acceptance[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
