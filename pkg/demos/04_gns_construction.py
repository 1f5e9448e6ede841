"""
GNS reconstruction
==================

A state on M_d(C) yields a Hilbert space, a representation and a cyclic
vector. Pure states give dimension d, faithful states give d^2.
"""

# %%
from qalg import QuantumState, gns_construct, make_rng, verify_gns
from qalg.rng import random_density, random_pure_vector

rng = make_rng(3, "demo-gns")
for d in (2, 3, 4):
    for label, psi in [
        ("pure", QuantumState.pure(random_pure_vector(d, rng))),
        ("full rank", QuantumState.from_density(random_density(d, rng))),
    ]:
        rep = gns_construct(psi)
        report = verify_gns(rep, psi, 100, rng)
        print(f"d={d} {label:>9}: rep_dim={rep.rep_dim:>2}  "
              f"hom={report.homomorphism:.1e} star={report.star:.1e} state={report.state:.1e}")
