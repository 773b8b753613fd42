"""Fuel-instrumented evaluation utilities.

The evaluator itself threads an optional budget (see ``interp``); this
module provides the bounded-evaluation boundary, the search for minimal
sufficient fuel on the terminating subset, and a large-stack runner that
serves as the host-stack guard for effectively-unbounded evaluation.
"""

from __future__ import annotations

import sys
import threading
from typing import Callable

from .interp import Evaluator
from .syntax import Expr, is_finite_subset
from .values import Result, Store, Timeout


class HostStackGuard(Exception):
    """The host interpreter ran out of stack.

    A resource diagnostic for unbounded (or absurdly-fueled) runs; distinct
    from an in-band timeout, which is part of the bounded semantics.
    """


def eval_expr_fuel(ev: Evaluator, e: Expr, store: Store, fuel: int) -> tuple[Result, Store]:
    """Evaluate with a recursion budget; exhaustion yields a timeout result
    with the store at the point of exhaustion."""
    if fuel < 0:
        raise ValueError("fuel must be a natural number")
    try:
        return ev.evaluate(e, store, fuel)
    except RecursionError:
        raise HostStackGuard(
            "host stack exhausted before the fuel budget; rerun under "
            "call_with_stack or with a smaller budget"
        ) from None


def min_sufficient_fuel(ev: Evaluator, e: Expr, store: Store, cap: int = 1 << 22) -> int:
    """Smallest budget at which ``e`` evaluates without timing out.

    Only defined on the terminating subset, where a sufficient finite
    budget is guaranteed to exist; found by doubling then binary search.
    """
    if not is_finite_subset(e):
        raise ValueError("expression is outside the terminating subset")
    hi = 1
    while isinstance(eval_expr_fuel(ev, e, store, hi)[0], Timeout):
        hi *= 2
        if hi > cap:
            raise RuntimeError(f"no sufficient fuel found below {cap}")
    lo = hi // 2 + 1 if hi > 1 else 1
    while lo < hi:
        mid = (lo + hi) // 2
        if isinstance(eval_expr_fuel(ev, e, store, mid)[0], Timeout):
            lo = mid + 1
        else:
            hi = mid
    return hi


def call_with_stack(
    fn: Callable,
    *args,
    stack_bytes: int = 512 * 1024 * 1024,
    recursion_limit: int = 1_000_000,
    **kwargs,
):
    """Run ``fn`` on a worker thread with a large stack and recursion limit.

    Deeply recursive evaluations (high fuel budgets, unbounded runs) need
    more stack than the main thread carries; RecursionError still surfaces
    as HostStackGuard.
    """
    out: dict = {}

    def worker():
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(recursion_limit)
        try:
            out["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # noqa: BLE001 - transported to caller
            out["error"] = exc
        finally:
            sys.setrecursionlimit(old_limit)

    old_size = threading.stack_size(stack_bytes)
    try:
        t = threading.Thread(target=worker, name="rascal-light-eval")
        t.start()
        t.join()
    finally:
        threading.stack_size(old_size)
    if "error" in out:
        err = out["error"]
        if isinstance(err, RecursionError):
            raise HostStackGuard("host stack exhausted") from None
        raise err
    return out["value"]
