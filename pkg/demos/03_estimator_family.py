"""All seven output-error estimators on one shared workspace.

Each estimator trades sharpness against the number of auxiliary reduced
models it needs. The cheap end reuses a dual basis; the expensive end
solves small systems for the primal residual and even for the residual of
that solve. None of them touches an inf-sup or stability constant.

Stages and what they cost, roughly:

  delta1    dual ROM
  delta2    dual ROM + correction ROM for the dual residual
  delta2pr  dual ROM + ROM for the primal residual
  delta1pr  primal-residual ROM only
  delta3    delta1pr's ROM + dual ROM
  delta3pr  primal-residual ROM + ROM for ITS residual
  delta_r   dual ROM, output weighted by a random sketch
"""

import numpy as np

import romgrid as rg


def krylov_basis(sys, freqs, q, dual=False):
    block = rg.dual_krylov_block if dual else rg.krylov_block
    V = rg.Basis.empty(sys.order)
    for f in freqs:
        V = V.appended(block(sys, 2j * np.pi * f, q))
    return V


def main():
    sys = rg.rc_ladder(200)
    probe = rg.frequency_point(0.3)

    # moment-matching bases at deliberately different point sets per stage,
    # mimicking a mid-run greedy workspace
    V = krylov_basis(sys, (1e-2, 1.0), q=2)
    V_du = krylov_basis(sys, (3e-2, 2.0), q=2, dual=True)
    V_rdu = krylov_basis(sys, (1e-1,), q=2, dual=True)
    V_rpr = krylov_basis(sys, (5e-3, 0.5), q=2)
    V_rrpr = krylov_basis(sys, (8e-2,), q=2)

    H = sys.transfer_function(probe)
    true_err = None

    print(f"probe f = 0.3 Hz, |H| = {abs(H[0, 0]):.4e}")
    print(f"{'kind':>8} {'part1':>10} {'part2':>10} {'total':>10} {'effectivity':>12}")
    for kind in ("delta1", "delta2", "delta2pr", "delta1pr", "delta3", "delta3pr"):
        ws = rg.EstimatorWorkspace.from_bases(
            sys, kind, V, V_du=V_du, V_rdu=V_rdu, V_rpr=V_rpr, V_rrpr=V_rrpr
        )
        if true_err is None:
            rom = ws.rom_primal
            true_err = np.abs(H - rom.transfer_function(probe)).max()
        est = rg.evaluate(rg.EstimatorKind.from_name(kind), ws, sys, probe)
        print(f"{kind:>8} {est.part1:>10.3e} {est.part2:>10.3e} "
              f"{est.total:>10.3e} {est.total / true_err:>12.3f}")
    print(f"{'true':>8} {'':>10} {'':>10} {true_err:>10.3e}")

    # the randomized variant scales delta1 by the norm of a Gaussian sketch
    print()
    ws = rg.EstimatorWorkspace.from_bases(sys, "delta_r", V, V_du=V_du)
    for K in (5, 20, 80):
        val = rg.delta_r(ws, sys, probe, n_samples=K, rng_seed=1)
        print(f"delta_r with {K:>3} sketch samples: {val:.3e}")

    # sensitivity report: computable terms that bracket the truth without
    # ever forming the full error
    print()
    ws = rg.EstimatorWorkspace.from_bases(
        sys, "delta3pr", V, V_du=V_du, V_rdu=V_rdu, V_rpr=V_rpr, V_rrpr=V_rrpr
    )
    rep = rg.sensitivity_report(sys, ws, probe)
    ws2 = rg.EstimatorWorkspace.from_bases(sys, "delta2", V, V_du=V_du, V_rdu=V_rdu)
    est2 = rg.evaluate(rg.EstimatorKind.DELTA_2, ws2, sys, probe).total
    lo = est2 - rep.delta2_term - rep.epsilon1
    hi = est2 + rep.epsilon2
    print(f"delta2 envelope: [{lo:.3e}, {hi:.3e}] contains true {rep.true_error:.3e}: "
          f"{lo <= rep.true_error <= hi}")


if __name__ == "__main__":
    main()
