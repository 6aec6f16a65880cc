"""Command-line interface.

Every command prints a line-oriented report ending in a ``RESULT:`` line and
exits with 0 when the queried property holds, 1 when it fails (a witness is
printed) and 2 on malformed input or an exceeded resource cap.
"""
from __future__ import annotations

import itertools
import os
import sys

import click

from . import elements as el
from . import lazy, logic, morphisms, oracle, process as pr, sccs, terms as tm
from .errors import DomLogicError, ParseError
from .formulas import parse_formula, rank as formula_rank
from .sexpr import dumps, parse_many
from .types import parse_type

HOLDS, FAILS, ERROR = 0, 1, 2


class Outcome(Exception):
    """Raised by a command to finish with a result line and an exit code."""

    def __init__(self, code: int, result: str):
        super().__init__(result)
        self.code = code
        self.result = result


def _finish(code: int, result: str):
    raise Outcome(code, result)


def _text(arg: str) -> str:
    """The argument itself, or the contents of the file it names."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _emit(line: str = ""):
    click.echo(line)


class Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except Outcome as out:
            _emit(f"RESULT: {out.result}")
            ctx.exit(out.code)
        except (DomLogicError, RecursionError) as exc:
            kind = type(exc).__name__
            _emit(f"error: {kind}: {exc}")
            _emit(f"RESULT: error {kind}")
            ctx.exit(ERROR)
        except OSError as exc:
            _emit(f"error: {exc}")
            _emit("RESULT: error io")
            ctx.exit(ERROR)


@click.group(cls=Group)
def cli():
    """Decision procedures for domain logics, process logics and the lazy lambda calculus."""


def _verdict(ok: bool, yes: str, no: str):
    _finish(HOLDS if ok else FAILS, yes if ok else no)


def _pairs_from_file(path: str) -> list:
    """Query pairs, one pair of s-expressions per non-blank line."""
    out = []
    for n, line in enumerate(_text(path).splitlines(), 1):
        if not line.split("#", 1)[0].strip():
            continue
        items = parse_many(line)
        if len(items) != 2:
            raise ParseError(f"line {n}: expected two formulas, got {len(items)}")
        out.append(tuple(dumps(x) for x in items))
    return out


def _batch(path: str, decide) -> None:
    failed = 0
    pairs = _pairs_from_file(path)
    for left, right in pairs:
        ok, extra = decide(left, right)
        failed += not ok
        _emit(f"{'yes' if ok else 'no '} {left} <= {right}{extra}")
    _verdict(not failed, f"all {len(pairs)} entailments hold", f"{failed} of {len(pairs)} fail")


# ---------------------------------------------------------------- domain logic

@cli.command()
@click.option("--type", "type_", required=True, help="Type expression.")
@click.option("--cap", type=int, default=logic.NODE_CAP, show_default=True, help="Normal-form node cap.")
@click.option("--file", "file_", help="Batch file with one 'phi psi' pair per line.")
@click.argument("phi", required=False)
@click.argument("psi", required=False)
def entail(type_, cap, file_, phi, psi):
    """Decide whether PHI entails PSI at the given type."""
    sigma = parse_type(type_)

    def decide(a: str, b: str):
        f, g = parse_formula(a), parse_formula(b)
        logic.check_well_formed(f, sigma)
        logic.check_well_formed(g, sigma)
        u = logic.entailment_witness(f, g, sigma, cap)
        return u is None, "" if u is None else f"  (witness: element {u})"

    if file_:
        _batch(file_, decide)
    if phi is None or psi is None:
        raise ParseError("entail needs PHI and PSI, or --file")
    ok, extra = decide(_text(phi), _text(psi))
    if not ok:
        _emit(extra.strip()[1:-1])
    _verdict(ok, "entails", "does not entail")


@cli.command()
@click.option("--type", "type_", required=True, help="Type expression.")
@click.option("--cap", type=int, default=logic.NODE_CAP, show_default=True, help="Normal-form node cap.")
@click.argument("phi")
def cdnf(type_, cap, phi):
    """Print the consistent disjunctive normal form of PHI and its meta-predicates."""
    sigma = parse_type(type_)
    f = parse_formula(_text(phi))
    logic.check_well_formed(f, sigma)
    normal = logic.to_cdnf(f, sigma, cap)
    flags = logic.meta_predicates(f, sigma)
    _emit(f"cdnf: {normal}")
    _emit(f"pnf: {flags.pnf}  con: {flags.con}  term: {flags.term}  cpnf: {flags.cpnf}")
    for u in logic.minsat(f, sigma):
        _emit(f"minimal element: {u}")
    _finish(HOLDS, f"cdnf {normal}")


def _context(variables) -> tuple:
    ctx, gamma = {}, {}
    for name, ty, phi in variables:
        ctx[name] = parse_type(ty)
        gamma[name] = parse_formula(phi)
        logic.check_well_formed(gamma[name], ctx[name])
    return ctx, gamma


_VAR_OPTION = click.option("--var", "variables", multiple=True, type=(str, str, str),
                           metavar="NAME TYPE FORMULA", help="Typed free variable with an assumption.")


@cli.command()
@_VAR_OPTION
@click.option("--rank", type=int, help="Evaluation rank (default: least sufficient).")
@click.option("--fuel", type=int, help="Fixpoint iterations for mu terms.")
@click.argument("term")
@click.argument("phi")
def check(variables, rank, fuel, term, phi):
    """Decide whether TERM satisfies PHI under the assumptions on its free variables."""
    ctx, gamma = _context(variables)
    m = tm.parse_term(_text(term))
    f = parse_formula(_text(phi))
    ty = tm.type_of(m, ctx)
    k = rank if rank is not None else max(1, tm.required_rank(f, ty, gamma, ctx))
    _emit(f"type: {ty}")
    _emit(f"rank: {k}")
    if tm.has_mu(m):
        _emit("note: mu terms are approximated by finitely many iterates (lower bound)")
    if tm.check(m, gamma, f, k, ctx, fuel):
        _finish(HOLDS, "holds")
    names = sorted(ctx)
    pools = [[u for u in el.enumerate_elements(ctx[x], k) if el.sat(u, gamma[x], ctx[x])] for x in names]
    annotated, _ = tm.elaborate(m, ctx)
    for pick in itertools.product(*pools):
        env = dict(zip(names, pick))
        value = tm.eval_annotated(annotated, env, k, fuel)
        if not el.sat(value, f, ty):
            for x in names:
                _emit(f"witness {x} = {env[x]}")
            _emit(f"value: {value}")
            break
    _finish(FAILS, "fails")


@cli.command("eval")
@click.option("--var", "variables", multiple=True, type=(str, str), metavar="NAME TYPE",
              help="Typed free variable, bound to bottom.")
@click.option("--rank", type=int, default=2, show_default=True)
@click.option("--fuel", type=int, help="Fixpoint iterations for mu terms.")
@click.argument("term")
def eval_(variables, rank, fuel, term):
    """Print the rank-k finite element denoted by TERM."""
    ctx = {name: parse_type(ty) for name, ty in variables}
    m = tm.parse_term(_text(term))
    ty = tm.type_of(m, ctx)
    env = {x: el.bottom(t) for x, t in ctx.items()}
    value = tm.eval_term(m, env, rank, ctx, fuel)
    _emit(f"type: {ty}")
    if tm.has_mu(m):
        _emit("note: lower bound (finitely many fixpoint iterates)")
    _finish(HOLDS, f"value {value}")


@cli.command()
@click.option("--rank", type=int, help="Evaluation rank (default: least sufficient).")
@click.option("--fuel", type=int, help="Fixpoint iterations for mu terms.")
@click.argument("morphism")
@click.argument("phi")
@click.argument("psi")
def hoare(rank, fuel, morphism, phi, psi):
    """Decide the Hoare triple {PHI} MORPHISM {PSI}."""
    f = morphisms.parse_morphism(_text(morphism))
    src, tgt = morphisms.sort_of(f)
    pre, post = parse_formula(_text(phi)), parse_formula(_text(psi))
    logic.check_well_formed(pre, src)
    logic.check_well_formed(post, tgt)
    k = rank if rank is not None else 1 + max(formula_rank(pre, src), formula_rank(post, tgt))
    _emit(f"sort: {src} -> {tgt}")
    _emit(f"rank: {k}")
    if morphisms.hoare(f, pre, post, k, fuel):
        _finish(HOLDS, "triple holds")
    g = morphisms.denote(f, k, fuel)
    for u in el.enumerate_elements(src, formula_rank(pre, src)):
        if el.sat(u, pre, src) and not el.sat(el.apply(g, u), post, tgt):
            _emit(f"witness input {u} maps to {el.apply(g, u)}")
            break
    _finish(FAILS, "triple fails")


# ---------------------------------------------------------------- process logic

def _lts(arg: str) -> pr.Lts:
    return pr.parse_lts(_text(arg))


def _state(l: pr.Lts, p: str) -> str:
    if p not in l.states:
        raise ParseError(f"unknown state {p!r}")
    return p


@cli.command("proc-bisim")
@click.argument("lts")
@click.argument("p")
@click.argument("q")
def proc_bisim(lts, p, q):
    """Decide whether state P is prebisimilar below state Q."""
    l = _lts(lts)
    p, q = _state(l, p), _state(l, q)
    rel, rounds = pr.prebisim_relation(l)
    _emit(f"refinement rounds: {rounds}")
    if (p, q) in rel:
        _finish(HOLDS, f"{p} below {q}")
    d = pr.universal_sem(l, p, rounds + 1)
    _emit(f"witness formula: {pr.def_formula(d)} (satisfied by {p}, not by {q})")
    _finish(FAILS, f"{p} not below {q}")


@cli.command("proc-sat")
@click.argument("lts")
@click.argument("p")
@click.argument("phi")
def proc_sat(lts, p, phi):
    """Decide whether state P satisfies the process formula PHI."""
    l = _lts(lts)
    p = _state(l, p)
    f = pr.parse_proc_formula(_text(phi))
    _verdict(pr.psat(l, p, f), f"{p} satisfies", f"{p} does not satisfy")


@cli.command("proc-sdnf")
@click.argument("phi")
def proc_sdnf(phi):
    """Print the strong disjunctive normal form of PHI."""
    f = pr.parse_proc_formula(_text(phi))
    normal = pr.sdnf(f)
    _emit(f"modal depth: {pr.modal_depth(f)} -> {pr.modal_depth(normal)}")
    _finish(HOLDS, f"sdnf {normal}")


@cli.command("proc-entail")
@click.option("--file", "file_", help="Batch file with one 'phi psi' pair per line.")
@click.argument("phi", required=False)
@click.argument("psi", required=False)
def proc_entail(file_, phi, psi):
    """Decide whether process formula PHI entails PSI."""
    def decide(a: str, b: str):
        d = pr.entailment_witness(pr.parse_proc_formula(a), pr.parse_proc_formula(b))
        return d is None, "" if d is None else f"  (witness: element {d})"

    if file_:
        _batch(file_, decide)
    if phi is None or psi is None:
        raise ParseError("proc-entail needs PHI and PSI, or --file")
    ok, extra = decide(_text(phi), _text(psi))
    if not ok:
        _emit(extra.strip()[1:-1])
    _verdict(ok, "entails", "does not entail")


@cli.command("proc-translate")
@click.option("--acts", required=True, help="Declared actions, space separated.")
@click.option("--no-init", is_flag=True, help="Translate boxes without init atoms.")
@click.argument("formula")
def proc_translate(acts, no_init, formula):
    """Translate an HML formula into a process formula, or a process formula into HML."""
    declared = acts.split()
    text = _text(formula)
    if any(tag in text for tag in ("boxa", "diaa", "init")):
        psi = pr.parse_hml(text)
        _finish(HOLDS, f"process formula {pr.star(psi, declared)}")
    phi = pr.parse_proc_formula(text)
    _finish(HOLDS, f"hml {pr.dagger(phi, declared, use_init=not no_init)}")


# ---------------------------------------------------------------- SCCS

_MONOID_HEADS = ("monoid", "elements", "unit", "row")


def _split_sccs(arg: str, default_monoid: str) -> tuple:
    """Monoid declaration and term text; the declaration lines are optional."""
    header, body = [], []
    for line in _text(arg).splitlines():
        words = line.split("#", 1)[0].split()
        (header if words and words[0] in _MONOID_HEADS else body).append(" ".join(words))
    return "\n".join(header) if header else f"monoid {default_monoid}", "\n".join(body)


def _sccs(arg: str, default_monoid: str):
    decl, body = _split_sccs(arg, default_monoid)
    monoid = sccs.parse_monoid(decl)
    return sccs.parse_sccs(body, monoid), monoid


_MONOID_OPTION = click.option("--monoid", default="free a b", show_default=True,
                              help="Monoid used when the term declares none.")


@cli.command("sccs-step")
@_MONOID_OPTION
@click.option("--fuel", type=int, default=32, show_default=True)
@click.argument("term")
def sccs_step(monoid, fuel, term):
    """List the one-step transitions of TERM and its divergence."""
    t, m = _sccs(term, monoid)
    tr = sccs.transitions(t, m, fuel)
    for act, nxt in sorted(tr.steps, key=str):
        _emit(f"{act} -> {nxt}")
    if not tr.complete:
        _emit("note: transition set may be incomplete (fuel ran out)")
        _finish(ERROR, "unknown")
    _finish(HOLDS, f"{len(tr.steps)} transitions, {'divergent' if tr.diverges else 'convergent'}")


@cli.command("sccs-denote")
@_MONOID_OPTION
@click.option("--rank", type=int, default=3, show_default=True)
@click.argument("term")
def sccs_denote(monoid, rank, term):
    """Print the rank-k finite element denoted by TERM."""
    t, m = _sccs(term, monoid)
    _finish(HOLDS, f"element {sccs.denote(t, m, rank)}")


@cli.command("sccs-fa")
@_MONOID_OPTION
@click.argument("t1")
@click.argument("t2")
def sccs_fa(monoid, t1, t2):
    """Compare two recursion-free terms operationally and denotationally."""
    (d1, s1), (d2, s2) = _split_sccs(t1, monoid), _split_sccs(t2, monoid)
    if d1 != d2:
        raise ParseError("the two terms declare different monoids")
    m = sccs.parse_monoid(d1)
    rep = sccs.full_abstraction_report(sccs.parse_sccs(s1, m), sccs.parse_sccs(s2, m), m)
    _emit(f"operational: left below {rep.operational.left_below}, right below {rep.operational.right_below}")
    _emit(f"denotational at rank {rep.depth}: left below {rep.left_below}, right below {rep.right_below}")
    _finish(HOLDS if rep.agrees else FAILS, rep.summary())


# ---------------------------------------------------------------- lazy lambda calculus

_DIALECT_OPTION = click.option("--dialect", type=click.Choice(sorted(lazy.DIALECTS)), default="pure",
                               show_default=True)


@cli.command("lazy-eval")
@_DIALECT_OPTION
@click.option("--fuel", type=int, default=lazy.DEFAULT_FUEL, show_default=True)
@click.option("--rank", type=int, help="Also print the rank-k element.")
@click.argument("term")
def lazy_eval(dialect, fuel, rank, term):
    """Reduce a closed TERM to weak head normal form."""
    t = lazy.parse_lambda(_text(term), dialect)
    out = lazy.eval_whnf(t, fuel, dialect)
    if rank is not None:
        _emit(f"element at rank {rank}: {lazy.eval_elem(t, k=rank, dialect=dialect)!r}")
    _emit(str(out))
    if out.kind == "fuel-out":
        _finish(ERROR, "fuel-out")
    _verdict(out.converges, f"converges {out.term}", "diverges")


@cli.command("lazy-entail")
@click.option("--file", "file_", help="Batch file with one 'phi psi' pair per line.")
@click.argument("phi", required=False)
@click.argument("psi", required=False)
def lazy_entail(file_, phi, psi):
    """Decide entailment in the lazy logic."""
    def decide(a: str, b: str):
        f, g = lazy.parse_lformula(a), lazy.parse_lformula(b)
        ok = lazy.entails_lazy(f, g)
        return ok, "" if ok else f"  (witness: element {lazy.lelem(f)!r})"

    if file_:
        _batch(file_, decide)
    if phi is None or psi is None:
        raise ParseError("lazy-entail needs PHI and PSI, or --file")
    ok, extra = decide(_text(phi), _text(psi))
    if not ok:
        _emit(extra.strip()[1:-1])
    _verdict(ok, "entails", "does not entail")


@cli.command("lazy-check")
@_DIALECT_OPTION
@click.option("--var", "variables", multiple=True, type=(str, str), metavar="NAME FORMULA",
              help="Assumption on a free variable.")
@click.option("--rank", type=int)
@click.option("--fuel", type=int, default=lazy.ELEM_FUEL, show_default=True)
@click.argument("term")
@click.argument("phi")
def lazy_check(dialect, variables, rank, fuel, term, phi):
    """Decide whether TERM satisfies the lazy-logic formula PHI."""
    t = lazy.parse_lambda(_text(term), dialect)
    gamma = {x: lazy.parse_lformula(g) for x, g in variables}
    f = lazy.parse_lformula(_text(phi))
    if lazy.lcheck(t, gamma, f, rank, dialect, fuel):
        _finish(HOLDS, "holds")
    k = rank if rank is not None else max([lazy.ldepth(f), *(lazy.ldepth(g) for g in gamma.values())])
    env = {x: lazy.lelem(g) for x, g in gamma.items()}
    env.update({x: lazy.LBOT for x in lazy.free_vars(t) - set(env)})
    _emit(f"value at rank {k}: {lazy.eval_elem(t, env, k, dialect, fuel)!r}")
    _emit(f"required: {lazy.lelem(f)!r}")
    _finish(FAILS, "fails")


@cli.command("lazy-classify")
@_DIALECT_OPTION
@click.option("--fuel", type=int, default=lazy.DEFAULT_FUEL, show_default=True)
@click.argument("term")
def lazy_classify(dialect, fuel, term):
    """Classify TERM by the shape of its head reduction."""
    t = lazy.parse_lambda(_text(term), dialect)
    c = lazy.classify(t, fuel, dialect)
    _finish(HOLDS if c.kind != "diverges-or-fuel-out" else FAILS, str(c))


# ---------------------------------------------------------------- oracle suites

@cli.command("oracle-suite")
@click.option("--module", type=click.Choice(["all", *sorted(oracle.SUITES)]), default="all",
              show_default=True)
@click.option("--cases", type=int, default=100, show_default=True)
@click.option("--size", type=int, default=6, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def oracle_suite(module, cases, size, seed):
    """Run randomized comparisons of the decision procedures against brute-force oracles."""
    reports = sorted(oracle.run_suites(module, cases, size, seed), key=lambda r: r.name)
    for rep in reports:
        for line in rep.lines():
            _emit(line)
    bad = [r.name for r in reports if not r.ok]
    total = sum(r.cases for r in reports)
    _verdict(not bad, f"all {len(reports)} suites agree on {total} cases", f"{len(bad)} suites disagree")


def main(argv=None):
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    cli.main(args=argv, prog_name="domlogic")


if __name__ == "__main__":
    main()
