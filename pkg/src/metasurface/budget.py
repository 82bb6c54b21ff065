import os

DEFAULT_BUDGET = 1 << 22
ENV_VAR = "METASURFACE_BUDGET"


class BudgetExceeded(RuntimeError):
    pass


def enumeration_budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{ENV_VAR} must be positive")
    return value


def check_budget(size: int, what: str) -> None:
    limit = enumeration_budget()
    if size > limit:
        raise BudgetExceeded(f"{what} needs {size} states, budget is {limit} (set {ENV_VAR})")
