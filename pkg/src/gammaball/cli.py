"""Command line interface: evaluation, benchmark tables, Bernoulli stream, selftest."""

import argparse
import json
import math
import sys
import time

import gmpy2
from gmpy2 import mpq

from . import balls as B
from .balls import ComplexBall, cb, cb_str, rb_from_str, rb_str, rb_zero
from .kinds import AlgoKind, FunctionKind

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

_FN = {k.value: k for k in FunctionKind}
_ALGO = {k.value: k for k in AlgoKind}


def _bits_of(args):
    if args.bits:
        return args.bits
    digits = args.digits or 30
    return int(math.ceil(digits * math.log2(10))) + 2


def _parse_argument(args, p):
    if args.rat:
        num, _, den = args.rat.partition('/')
        return mpq(int(num), int(den or 1))
    re = rb_from_str(args.re, p + 32) if args.re else rb_zero()
    if args.im:
        return ComplexBall(re, rb_from_str(args.im, p + 32))
    return ComplexBall(re, rb_zero())


def cmd_eval(args):
    from .api import AlgorithmUnavailable, evaluate
    p = _bits_of(args)
    fn = _FN[args.fn]
    algo = _ALGO[args.algo]
    z = _parse_argument(args, p)
    try:
        out = evaluate(fn, z, p, algo)
    except AlgorithmUnavailable as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    digits = args.digits or max(10, int((p - 2) / math.log2(10)))
    if args.json:
        payload = {
            "function": fn.value,
            "bits": p,
            "re": {"mid": _mid_str(out.re, digits), "rad": _rad_str(out.re)},
            "im": {"mid": _mid_str(out.im, digits), "rad": _rad_str(out.im)},
        }
        print(json.dumps(payload))
    else:
        print(cb_str(out, digits, args.radius_digits))
    return EXIT_OK if out.is_finite() else EXIT_DOMAIN


def _mid_str(rb, digits):
    return B._mpfr_to_decimal(rb.mid, digits) if gmpy2.is_finite(rb.mid) else 'nan'


def _rad_str(rb):
    return f"{float(rb.rad):.2e}" if gmpy2.is_finite(rb.rad) else 'inf'


def cmd_bernoulli(args):
    from .bernoulli import bernoulli_batch
    count = args.count
    if count < 2:
        print("error: --count must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    n_max = count if count % 2 == 0 else count - 1
    rows = list(bernoulli_batch(n_max))
    rows.reverse()
    for i, frac in enumerate(rows):
        n = 2 * (i + 1)
        if args.format == 'json':
            print(json.dumps({"n": n, "num": str(frac.numerator),
                              "den": str(frac.denominator)}))
        else:
            print(f"B_{n} = {frac.numerator}/{frac.denominator}")
    return EXIT_OK


def cmd_bench(args):
    out = sys.stdout
    if args.table == 'stirling-sum':
        _bench_stirling_sum(out, slow=args.slow)
    elif args.table == 'spouge-error':
        _bench_spouge(out, args.r)
    elif args.table == 'taylor-coeffs':
        _bench_taylor(out)
    elif args.table == 'timings':
        _bench_timings(out, slow=args.slow)
    else:
        print(f"error: unknown table {args.table}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _bench_stirling_sum(out, slow=False):
    from .bernoulli import default_cache
    from .stirling import main_sum_fast, main_sum_horner, schedule_sum, select_params
    print("d,z,N,horner_s,K,M,fast_s", file=out)
    ds = [100, 1000] + ([10000] if slow else [])
    for d in ds:
        p = int(math.ceil(d * math.log2(10)))
        zs = {100: '89.1', 1000: '896.1', 10000: '8969.1'}[d]
        z = cb(rb_from_str(zs, p + 16), 0)
        plan = select_params(z, p, FunctionKind.GAMMA)
        sched = schedule_sum(z, plan.N, p)
        default_cache().ensure(plan.N + 1)
        t0 = time.perf_counter()
        main_sum_horner(z, plan.N, p)
        th = time.perf_counter() - t0
        t0 = time.perf_counter()
        main_sum_fast(z, sched, p)
        tf = time.perf_counter() - t0
        print(f"{d},{zs},{plan.N},{th:.6f},{sched.K},{sched.M},{tf:.6f}", file=out)


def _bench_spouge(out, r):
    from .kinds import FunctionKind as FK
    from .spouge import spouge_error_bound, spouge_eval
    from .stirling import lgamma_stirling
    rs = [r] if r else [10, 100]
    print("r,z,measured_rel_error,bound", file=out)
    for rr in rs:
        p = max(96, int(3.5 * rr))
        z = cb(rb_from_str(repr(math.pi), p + 64), 0)
        ref = lgamma_stirling(z, p + 64, FK.GAMMA)
        got = spouge_eval(z, p, r=rr)
        rel = abs(mpq(got.re.mid) - mpq(ref.re.mid)) / abs(mpq(ref.re.mid))
        bound = spouge_error_bound(rr, z)
        print(f"{rr},pi,{float(rel):.3e},{float(bound):.3e}", file=out)


def _bench_taylor(out):
    from .taylor_local import coeff_bound, default_table
    tab = default_table()
    print("n,a_n,bound_optimal,bound_n8", file=out)
    for n in (1, 10, 100, 500):
        an = B._mpfr_to_decimal(tab.coeffs[n - 1].re.mid, 5)
        b1 = B._mpfr_to_decimal(coeff_bound(n), 3)
        b2 = B._mpfr_to_decimal(coeff_bound(n, 'n8'), 3)
        print(f"{n},{an},{b1},{b2}", file=out)


def _bench_timings(out, slow=False):
    from .api import evaluate
    from .kinds import FunctionKind as FK
    ds = [10, 30, 100, 300, 1000] + ([3000, 10000] if slow else [])
    algos = [AlgoKind.STIRLING, AlgoKind.TAYLOR, AlgoKind.SPOUGE, AlgoKind.HYPER]
    print("d," + ",".join(a.value for a in algos) + ",hyper-bs", file=out)
    for d in ds:
        p = int(math.ceil(d * math.log2(10)))
        z = cb(rb_from_str('1.3', p + 32), 0)
        row = [str(d)]
        for a in algos:
            try:
                t0 = time.perf_counter()
                evaluate(FK.GAMMA, z, p, a)
                row.append(f"{time.perf_counter() - t0:.6f}")
            except Exception:
                row.append("-")
        t0 = time.perf_counter()
        evaluate(FK.GAMMA, mpq(13, 10), p, AlgoKind.HYPER_RATIONAL_BS)
        row.append(f"{time.perf_counter() - t0:.6f}")
        print(",".join(row), file=out)


def cmd_selftest(args):
    failures = 0
    failures += _selftest_identities()
    failures += _selftest_cross_algorithms()
    failures += _selftest_bernoulli(slow=args.slow)
    failures += _selftest_roundtrip()
    if args.slow:
        failures += _selftest_schedule()
    print("selftest:", "FAIL" if failures else "PASS",
          f"({failures} failing checks)" if failures else "")
    return EXIT_DOMAIN if failures else EXIT_OK


def _report(name, ok):
    print(f"  {'PASS' if ok else 'FAIL'}  {name}")
    return 0 if ok else 1


def _selftest_identities():
    import random
    from .api import evaluate
    from .balls import c_mul, c_sinpi, c_sub, cb_contains_q, overlaps, c_add_i, cb_from_int
    rng = random.Random(8)
    bad = 0
    pi_q = mpq(gmpy2.const_pi(precision=200))
    for _ in range(25):
        x = rng.uniform(-20, 20)
        y = rng.uniform(0.1, 20)
        z = cb(rb_from_str(repr(x), 160), rb_from_str(repr(y), 160))
        g = evaluate(FunctionKind.GAMMA, z, 96, AlgoKind.STIRLING)
        g1 = evaluate(FunctionKind.GAMMA, c_add_i(z, 1, 160), 96, AlgoKind.STIRLING)
        if not overlaps(g1, c_mul(z, g, 96)):
            bad += 1
        gm = evaluate(FunctionKind.GAMMA, c_sub(cb_from_int(1), z, 160), 96, AlgoKind.STIRLING)
        prod = c_mul(c_mul(g, gm, 96), c_sinpi(z, 96), 96)
        if not cb_contains_q(prod, pi_q):
            bad += 1
    return _report("recurrence and reflection identities (25 samples)", bad == 0)


def _selftest_cross_algorithms():
    from .api import evaluate
    from .balls import overlaps
    bad = 0
    for zs in ('0.7', '1.3', '2.5'):
        z = cb(rb_from_str(zs, 400), 0)
        vals = []
        for a in (AlgoKind.STIRLING, AlgoKind.TAYLOR, AlgoKind.SPOUGE, AlgoKind.HYPER):
            try:
                vals.append(evaluate(FunctionKind.GAMMA, z, 128, a))
            except Exception:
                pass
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                if not overlaps(vals[i], vals[j]):
                    bad += 1
    return _report("cross-algorithm agreement at 128 bits", bad == 0)


def _selftest_bernoulli(slow=False):
    from .bernoulli import bernoulli_batch
    vals = list(bernoulli_batch(2000 if slow else 100))
    vals.reverse()
    ok = (vals[0] == mpq(1, 6) and vals[4] == mpq(5, 66)
          and vals[11] == mpq(-236364091, 2730))
    return _report(f"Bernoulli stream to B_{2000 if slow else 100}", ok)


def _selftest_roundtrip():
    from .balls import rb_parse
    b = rb_from_str('3.14159265358979', 128)
    s = rb_str(b, 12)
    back = rb_parse(s)
    ok = (mpq(back.mid) - mpq(back.rad) <= mpq(b.mid) - mpq(b.rad)
          and mpq(b.mid) + mpq(b.rad) <= mpq(back.mid) + mpq(back.rad))
    return _report("rendering round-trip containment", ok)


def _selftest_schedule():
    from .stirling import schedule_sum, select_params
    p = 33220
    z = cb(rb_from_str('8969.1', p + 16), 0)
    plan = select_params(z, p, FunctionKind.GAMMA)
    sched = schedule_sum(z, plan.N, p)
    ok = sched.K == 21 and abs(sched.M - 1678) <= 0.05 * 1678
    return _report(f"high-precision schedule (K={sched.K}, M={sched.M})", ok)


def build_parser():
    ap = argparse.ArgumentParser(prog='gammaball',
                                 description='Arbitrary-precision gamma functions '
                                             'with rigorous ball enclosures')
    sub = ap.add_subparsers(dest='command', required=True)

    ev = sub.add_parser('eval', help='evaluate a gamma-family function')
    ev.add_argument('--fn', choices=sorted(_FN), default='gamma')
    ev.add_argument('--re', help='real part (decimal string)')
    ev.add_argument('--im', help='imaginary part (decimal string)')
    ev.add_argument('--rat', help='exact rational argument P/Q')
    ev.add_argument('--bits', type=int, help='target precision in bits')
    ev.add_argument('--digits', type=int, help='target precision in decimal digits')
    ev.add_argument('--algo', choices=sorted(_ALGO), default='auto')
    ev.add_argument('--json', action='store_true')
    ev.add_argument('--radius-digits', type=int, default=2)
    ev.set_defaults(func=cmd_eval)

    be = sub.add_parser('bernoulli', help='stream exact Bernoulli fractions')
    be.add_argument('--count', type=int, required=True)
    be.add_argument('--format', choices=('text', 'json'), default='text')
    be.set_defaults(func=cmd_bernoulli)

    bn = sub.add_parser('bench', help='benchmark/reference tables (CSV)')
    bn.add_argument('--table', required=True,
                    choices=('stirling-sum', 'spouge-error', 'taylor-coeffs', 'timings'))
    bn.add_argument('--r', type=int, help='Spouge parameter for spouge-error')
    bn.add_argument('--slow', action='store_true')
    bn.set_defaults(func=cmd_bench)

    st = sub.add_parser('selftest', help='run the invariant suites')
    st.add_argument('--slow', action='store_true')
    st.set_defaults(func=cmd_selftest)

    tt = sub.add_parser('taylor-table', help='inspect or rebuild the coefficient table')
    tt.add_argument('--dump', type=int, metavar='N', help='print the first N entries')
    tt.add_argument('--verify', action='store_true',
                    help='reload the shipped table and cross-check it')
    tt.add_argument('--rebuild', nargs=2, type=int, metavar=('N', 'BITS'),
                    help='regenerate a table (writes to --out)')
    tt.add_argument('--out', help='output path for --rebuild')
    tt.set_defaults(func=cmd_taylor_table)
    return ap


def cmd_taylor_table(args):
    from .taylor_local import (build_taylor_table, coeff_bound, default_table,
                               save_table)
    if args.rebuild:
        n, bits = args.rebuild
        if not args.out:
            print("error: --rebuild needs --out", file=sys.stderr)
            return EXIT_USAGE
        save_table(build_taylor_table(n, bits), args.out)
        print(f"wrote {n} coefficients at {bits} bits to {args.out}")
        return EXIT_OK
    tab = default_table()
    if args.dump:
        for i in range(min(args.dump, tab.N)):
            print(f"b_{i} = {rb_str(tab.coeffs[i].re, 12)}")
        return EXIT_OK
    if args.verify:
        ok = tab.N >= 2 and tab.coeffs[0].re.mid == 1
        fresh = build_taylor_table(16, 128)
        from .balls import overlaps
        for i in range(16):
            ok = ok and overlaps(fresh.coeffs[i], tab.coeffs[i])
        for n in range(1, tab.N):
            lo = abs(mpq(tab.coeffs[n - 1].re.mid)) - mpq(tab.coeffs[n - 1].re.rad)
            if mpq(coeff_bound(n)) < lo:
                ok = False
                break
        print("taylor-table:", "PASS" if ok else "FAIL",
              f"(N={tab.N}, prec={tab.prec_bits})")
        return EXIT_OK if ok else EXIT_DOMAIN
    print(f"table: N={tab.N} coefficients certified at {tab.prec_bits} bits")
    return EXIT_OK


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    if args.command == 'eval' and not (args.re or args.rat):
        print("error: eval needs --re or --rat", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == '__main__':
    sys.exit(main())
