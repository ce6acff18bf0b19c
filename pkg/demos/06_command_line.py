"""The same workflow from the command line.

Everything the API does is reachable through ``romgrid`` subcommands, so
a reduction can live in a Makefile: ``reduce`` writes a run directory
with the trace, the bases, and the reduced model as a portable manifest;
``validate`` replays a saved run against any grid; ``compare`` races
estimators on one system.
"""

import pathlib
import subprocess
import sys
import tempfile


def run(argv, **kwargs):
    cmd = [sys.executable, "-m", "romgrid", *argv]
    print(f"$ romgrid {' '.join(argv)}")
    proc = subprocess.run(cmd, text=True, capture_output=True, **kwargs)
    print(proc.stdout, end="")
    if proc.returncode:
        print(proc.stderr, end="")
    print()
    return proc


def main():
    with tempfile.TemporaryDirectory() as tmp:
        run_dir = pathlib.Path(tmp) / "ladder_run"
        run([
            "reduce", "--synthetic", "rc_ladder:200",
            "--estimator", "delta2", "--tol", "1e-5",
            "--train", "f:1e-3:1e1:40:log",
            "--out", str(run_dir),
        ])

        print("run directory contents:")
        for p in sorted(run_dir.rglob("*")):
            if p.is_file():
                print(f"  {p.relative_to(run_dir)}")
        print()

        # replay the saved bases against a grid the run never saw
        run(["validate", str(run_dir), "--grid", "f:1e-3:1e1:97:log"])

        run([
            "compare", "--synthetic", "rc_ladder:200",
            "--estimators", "delta1pr,delta2,delta3",
            "--tol", "1e-5", "--train", "f:1e-3:1e1:40:log",
        ])


if __name__ == "__main__":
    main()
