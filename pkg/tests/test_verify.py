import os
import random
import signal
import subprocess
import sys
import time
from math import gcd

import pytest

from delicate_primes.covering import CongruenceClass, CoveringEntry, CoveringSystem, ResidueClass, build_congruence
from delicate_primes.primality import is_probable_prime
from delicate_primes.errors import CheckpointError, NotMember
from delicate_primes.verify import (
    certify_widely,
    gcd_sweep,
    read_checkpoint,
    verify_period,
    write_checkpoint,
)


def test_verify_period_examples():
    assert verify_period(CoveringSystem(10, [CoveringEntry(3, 7, 6, 0)]))
    assert not verify_period(CoveringSystem(10, [CoveringEntry(1, 11, 3, 0)]))
    assert verify_period(CoveringSystem(10))


def test_verify_period_base2(base2_system):
    assert verify_period(base2_system)
    # a mis-stated exponent breaks the period check
    assert not verify_period(CoveringSystem(2, base2_system.entries + (CoveringEntry(1, 11, 64, 0),)))


def test_sweep_toy_failure():
    system = CoveringSystem(2, [CoveringEntry(1, 3, 2, 1)])
    cls = build_congruence(system, [ResidueClass(1, 2)], check=False)
    p = 7
    rep = gcd_sweep(p, cls, system, (1, 3))
    assert not rep.all_passed and rep.first_failure == (1, 2)
    assert rep.first_leading_failure is None and rep.inner_failures == 1
    rep = gcd_sweep(p, cls, system, (1, 2))
    assert rep.all_passed


def test_sweep_stops_at_leading_failure():
    system = CoveringSystem(2, [CoveringEntry(1, 3, 2, 1)])
    cls = build_congruence(system, [ResidueClass(1, 2)], check=False)
    rep = gcd_sweep(7, cls, system, (0, 20))
    assert rep.first_failure == (1, 2)
    assert rep.first_leading_failure == (1, 4)  # 7 has 3 bits; k=3 passes, k=4 fails


def test_sweep_empty_range(base2_hit, base2_class, base2_system):
    assert gcd_sweep(base2_hit.candidate, base2_class, base2_system, (10, 10)).all_passed


def test_sweep_not_member(base2_class, base2_system):
    with pytest.raises(NotMember):
        gcd_sweep(base2_class.residue + 1, base2_class, base2_system)


def test_full_period_sweep(base2_hit, base2_class, base2_system):
    rep = gcd_sweep(base2_hit.candidate, base2_class, base2_system)
    assert (rep.k_start, rep.k_stop) == (0, 64) and rep.all_passed


def test_period_extension_sampling(base2_hit, base2_class, base2_system):
    p, M, N = base2_hit.candidate, base2_class.modulus, base2_system.period
    assert gcd_sweep(p, base2_class, base2_system).all_passed and verify_period(base2_system)
    rng = random.Random(1)
    for _ in range(100):
        k = rng.randrange(N, 10 * N)
        assert gcd(p + 2**k, M) > 1


def test_sweep_equals_naive_on_random_pairs():
    rng = random.Random(3)
    base = 10
    qs = [7, 11, 13, 37, 101, 9091, 9901]
    system = CoveringSystem(base, [CoveringEntry(d, q, 12, rng.randrange(12))
                                   for d, q in zip(range(1, 8), qs)])
    M = 1
    for q in qs:
        M *= q
    p = rng.randrange(10**30)
    cls = CongruenceClass(p % M, M)
    for _ in range(300):
        k = rng.randrange(0, 500)
        rep = gcd_sweep(p, cls, system, (k, k + 1))
        naive = all(gcd(p + d * base**k, M) > 1 for d in range(1, base))
        assert rep.all_passed == naive


def test_parallel_sweep_matches_sequential(base2_hit, base2_class, base2_system):
    p = base2_hit.candidate
    seq = gcd_sweep(p, base2_class, base2_system, (0, 5000))
    par = gcd_sweep(p, base2_class, base2_system, (0, 5000), workers=3)
    assert seq.all_passed == par.all_passed
    system = CoveringSystem(2, [CoveringEntry(1, 3, 2, 1)])
    cls = build_congruence(system, [ResidueClass(1, 2)], check=False)
    a = gcd_sweep(7, cls, system, (0, 40))
    b = gcd_sweep(7, cls, system, (0, 40), workers=4)
    assert (a.first_failure, a.first_leading_failure) == (b.first_failure, b.first_leading_failure)


def test_checkpoint_format(tmp_path):
    path = tmp_path / "ck"
    write_checkpoint(path, 12, 3, 4567)
    assert path.read_text() == "k=12 d=3 state=4567\n"
    assert read_checkpoint(path) == (12, 3, 4567)
    path.write_text("k=1 d=1\n")
    with pytest.raises(CheckpointError):
        read_checkpoint(path)
    path.write_text("k=1 d=1 state=2 extra=3\n")
    with pytest.raises(CheckpointError):
        read_checkpoint(path)


def test_checkpoint_resume_in_process(tmp_path, base2_hit, base2_class, base2_system):
    path = tmp_path / "ck"
    p = base2_hit.candidate
    full = gcd_sweep(p, base2_class, base2_system, (0, 1000))
    # interrupted run: stop after the first block by narrowing the range
    gcd_sweep(p, base2_class, base2_system, (0, 1000), checkpoint=path, checkpoint_every=300)
    assert read_checkpoint(path)[0] == 1000
    path.unlink()
    write_checkpoint(path, 600, 1, pow(2, 600, base2_class.modulus))
    resumed = gcd_sweep(p, base2_class, base2_system, (0, 1000), checkpoint=path,
                        checkpoint_every=300)
    assert resumed.resumed_from == 600 and resumed.all_passed == full.all_passed
    write_checkpoint(path, 600, 1, 12345)
    with pytest.raises(CheckpointError, match="does not match"):
        gcd_sweep(p, base2_class, base2_system, (0, 1000), checkpoint=path)


def test_checkpoint_resume_after_kill(tmp_path, base2_hit):
    from conftest import DATA

    pfile = tmp_path / "p.txt"
    pfile.write_text(f"{base2_hit.candidate}\n")
    ck = tmp_path / "sweep.ck"
    cmd = [sys.executable, "-m", "delicate_primes", "verify-widely", str(pfile),
           str(DATA / "base2_covering.txt"), "--odd", "--k-range", "0:3000000",
           "--checkpoint", str(ck), "--checkpoint-every", "20000"]
    proc = subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    deadline = time.time() + 120
    while not ck.exists() and time.time() < deadline and proc.poll() is None:
        time.sleep(0.05)
    killed = proc.poll() is None
    if killed:
        os.kill(proc.pid, signal.SIGKILL)
    proc.wait()
    k_at_kill = read_checkpoint(ck)[0]
    assert 0 < k_at_kill <= 3_000_000
    if killed:
        assert proc.returncode == -signal.SIGKILL
    done = subprocess.run(cmd + ["--format", "json"], capture_output=True, text=True)
    import json

    rec = json.loads(done.stdout)
    sweep = rec["result"]["gcd_sweep"]
    assert sweep["resumed_from"] >= k_at_kill
    assert sweep["all_passed"] is True
    assert read_checkpoint(ck)[0] == 3_000_000
    # partial range: report must not claim the full chain
    assert done.returncode == 1 and rec["result"]["full_period"] is False


def test_certify_examples(base2_hit, base2_class, base2_system):
    rep = certify_widely(base2_hit.candidate, base2_class, base2_system)
    assert rep.all_passed
    assert rep.membership and rep.period_check and rep.gcd_sweep.all_passed
    assert rep.delicacy.delicate and rep.exceeds_factors
    assert "gcd" in rep.chain
    other = certify_widely(294001, base2_class, base2_system)
    assert not other.membership and not other.all_passed
    c = base2_class.member(0)
    while is_probable_prime(c):
        c += base2_class.modulus
    rep = certify_widely(c, base2_class, base2_system)
    assert rep.delicacy is None and "NotPrime" in rep.delicacy_error and not rep.all_passed
