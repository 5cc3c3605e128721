import json

from ._modunif import *  # noqa: F401,F403
from ._modunif import replay_json, verify_json


def verify(program, start, target, bound=1000, mode="universal", seed=1, trials=1000, budget=50_000):
    """Run the reduction pipeline and return the report as a dict."""
    return json.loads(verify_json(program, start, target, bound, mode, seed, trials, budget))


def replay(report, budget=50_000):
    if not isinstance(report, str):
        report = json.dumps(report)
    return replay_json(report, budget)
