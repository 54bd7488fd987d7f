"""Hook for an external SAT/QBF solver binary.

The binary is named by the ``SOMM_QBF_SOLVER`` environment variable (a path
or a command with arguments) and is run as ``<command> <file>``.  Exit status
10 means true (satisfiable), 20 means false; anything else is an error.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess

ENV_VAR = "SOMM_QBF_SOLVER"
EXIT_TRUE, EXIT_FALSE = 10, 20


class ExternalSolverError(RuntimeError):
    pass


def external_command() -> list | None:
    """The configured solver command, or None when none is configured or found."""
    spec = os.environ.get(ENV_VAR, "").strip()
    if not spec:
        return None
    cmd = shlex.split(spec)
    if shutil.which(cmd[0]) is None:
        return None
    return cmd


def run_external(path: str, timeout: float | None = None, command: list | None = None) -> bool:
    cmd = command or external_command()
    if cmd is None:
        raise ExternalSolverError(f"no external solver: set {ENV_VAR} to an executable")
    try:
        proc = subprocess.run([*cmd, str(path)], capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        raise ExternalSolverError(f"external solver exceeded {timeout:g} s") from None
    except OSError as exc:
        raise ExternalSolverError(f"cannot run external solver: {exc}") from None
    if proc.returncode == EXIT_TRUE:
        return True
    if proc.returncode == EXIT_FALSE:
        return False
    tail = (proc.stderr or proc.stdout).strip().splitlines()[-1:] or [""]
    raise ExternalSolverError(f"external solver exited with status {proc.returncode}: {tail[0]}")
