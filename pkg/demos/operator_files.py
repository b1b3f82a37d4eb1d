"""Solving a problem ingested from files.

Writes a small operator in coordinate text format plus an initial-state
vector, loads them back, attaches a decaying source, and evolves. The same
files drive the command line:  bromell solve --problem file --matrix ... --u0 ...

Run:  python3 demos/operator_files.py
"""

import pathlib
import tempfile

import numpy as np

import bromell as bm

workdir = pathlib.Path(tempfile.mkdtemp(prefix="bromell_files_"))
mpath = workdir / "operator.mtx"
upath = workdir / "u0.txt"

A = np.array(
    [
        [-2.0, 1.0, 0.0],
        [1.0, -3.0, 1.0],
        [0.0, 1.0, -4.0],
    ]
)
bm.save_operator(mpath, A)
bm.save_vector(upath, [1.0, 0.0, 0.5])
print(f"wrote {mpath} and {upath}")

problem = bm.load_problem(mpath, upath, source_spec=[(0.5, np.array([0.0, 0.2, 0.0]))])
print(f"loaded dim-{problem.dim} problem, source poles {problem.singularities}")

t = 2.0
rep = bm.solve(problem, t, 1e-9, bm.SolveOptions(grid_pts=32, validate=True))
print(f"a = {rep.contour.a:.4f}, c = {rep.truncation.c:.4f}, N = {rep.result.N}")
print(f"u({t:g}) = {np.array2string(rep.result.approx, precision=10)}")
print(f"error vs matrix-exponential reference: {rep.reference_error:.3e}")

back = bm.load_operator(mpath)
print(f"round trip exact: {np.array_equal(back.entries, A)}")
