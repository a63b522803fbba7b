#!/usr/bin/env python3
"""Smoke test for the Python bindings.

Builds the extension with cargo (unless PCONTACT_SKIP_BUILD is set), loads
it from the target directory, and exercises the main types and operations:
certificates on the bundled examples, the exterior calculus, kernels, the
deformation recursion, and the structure-theorem demo.

Run from the repository root:

    python3 python/smoke_test.py
"""

import json
import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def build_and_import():
    if not os.environ.get("PCONTACT_SKIP_BUILD"):
        subprocess.run(
            ["cargo", "build", "-p", "pcontact-py"],
            cwd=ROOT,
            check=True,
        )
    candidates = [
        os.path.join(ROOT, "target", "debug", "libpcontact.so"),
        os.path.join(ROOT, "target", "release", "libpcontact.so"),
        os.path.join(ROOT, "target", "debug", "libpcontact.dylib"),
        os.path.join(ROOT, "target", "release", "libpcontact.dylib"),
    ]
    built = next((c for c in candidates if os.path.exists(c)), None)
    if built is None:
        sys.exit("no built extension found; run `cargo build -p pcontact-py` first")
    stage = tempfile.mkdtemp(prefix="pcontact-py-")
    shutil.copy(built, os.path.join(stage, "pcontact.so"))
    sys.path.insert(0, stage)
    import pcontact

    return pcontact


def check(cond, what):
    if not cond:
        sys.exit(f"FAIL: {what}")
    print(f"ok: {what}")


def main():
    pc = build_and_import()

    # The basic contact example.
    iw = pc.Algebra.parse("dim 3; d phi3 = phi1^phi2")
    check(iw.dim == 3 and iw.parallelisable, "parsed the Iwasawa algebra")
    check(json.loads(iw.validate())["valid"], "algebra validates")

    gamma = iw.form("phi3")
    cert = json.loads(pc.verify_p_contact(iw, gamma))
    check(cert["valid"] and cert["top_coefficient"] == "1", "Iwasawa certificate c = 1")

    # Exterior calculus sanity.
    check(str(gamma.d()) == "phi1^phi2", "d phi3 = phi1^phi2")
    check(gamma.d().d().is_zero(), "d^2 = 0")
    w = iw.form("phi1^phi2")
    check(w.wedge(gamma).bidegree() == (3, 0), "wedge bidegree bookkeeping")
    check(iw.form("phi1^phi~2").conj() == iw.form("-phi2^phi~1"), "conjugation sign")

    # The dimension-7 example with certificate 12.
    g2 = pc.Algebra.parse(
        "dim 7; d phi5 = phi1^phi2 + phi3^phi4;"
        " d phi6 = phi1^phi3 - phi2^phi4; d phi7 = phi1^phi4 + phi2^phi3"
    )
    g2_gamma = g2.form(
        "phi1^phi2^phi5 + phi3^phi4^phi5 + phi1^phi3^phi6 - phi2^phi4^phi6"
        " + phi1^phi4^phi7 + phi2^phi3^phi7 + phi5^phi6^phi7"
    )
    cert = json.loads(pc.verify_p_contact(g2, g2_gamma))
    check(cert["valid"] and cert["top_coefficient"] == "12", "dimension-7 certificate c = 12")

    # Kernels and splitting on the contact example.
    k = json.loads(pc.kernels(gamma))
    check(k["rank_f"] == 2 and k["rank_g"] == 1, "kernel ranks (2, 1)")
    check(k["basis_g"] == ["e3"], "G spanned by e3")
    check(k["splitting"]["splits"], "F + G fills the frame")

    # Vector calculus and the deformation recursion.
    psi1 = iw.vector("phi~1 * e2 + phi~2 * e1")
    br = psi1.bracket(psi1)
    check(str(br) == "2*phi~1^phi~2*e3", "self-bracket of the seed")
    d = json.loads(pc.deform(gamma, psi1, 8))
    check(d["terminated"] and d["psi"] == ["phi~2*e1 + phi~1*e2", "phi~3*e3"], "series terminates at order 2")
    check(d["maurer_cartan"]["exact"], "exact Maurer-Cartan identity")
    check(d["essential_horizontal_dim"] == 4, "essential horizontal dimension 4")

    # Frölicher pages on a torus degenerate at the first page.
    t4 = pc.Algebra.torus("t4", 4)
    pages = json.loads(t4.froelicher())
    check(pages["e1"] == pages["e2"], "torus pages coincide")

    # Symbolic non-existence on the dimension-7 example.
    rep = json.loads(g2.no_invariant_contact())
    check(rep["verdict"] == "NoInvariantStructure", "no invariant contact structure")

    # The structure-theorem demo instance passes in full.
    st = json.loads(pc.structure_theorem_demo(1, "zero"))
    check(st["passed"] and st["extracted_omega"] == "phi1^phi2 + phi3^phi4", "structure theorem verified")

    # Identity suites on a seeded sampler.
    res = json.loads(pc.identity_suites(iw, 0, 25))
    check(all(r["passed"] for r in res), "identity suites pass")

    print("smoke test passed")


if __name__ == "__main__":
    main()
