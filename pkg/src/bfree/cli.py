"""Batch front door: family spec files in, JSON/CSV reports out.

Exit codes: 0 success, 1 a computational ceiling was hit (reported as a
structured JSON diagnostic), 2 usage or parse error.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import asdict
from fractions import Fraction
from importlib import metadata

import click

from . import family as fam
from . import heredity as hd
from . import structure as st
from . import window as win
from .errors import BFreeError, ComputationalLimit
from .periodic import indicator_window

try:
    VERSION = metadata.version("bfree")
except metadata.PackageNotFoundError:  # pragma: no cover
    VERSION = "0+unknown"


def _rat(x: Fraction | None) -> dict | None:
    if x is None:
        return None
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _envelope(B: fam.BFamily, config: dict, result: dict) -> dict:
    from .arith import FACTOR_CEILING, PRIME_SEARCH_CEILING
    from .periodic import IE_WIDTH_LIMIT, SIEVE_LIMIT

    return {
        "tool": {"name": "bfree", "version": VERSION},
        "family": {
            "label": getattr(B, "label", ""),
            "hash": fam.family_hash(B),
            "spec": fam.family_to_dict(B),
        },
        "config": config,
        "ceilings": {
            "factor": FACTOR_CEILING,
            "prime_search": PRIME_SEARCH_CEILING,
            "sieve": SIEVE_LIMIT,
            "inclusion_exclusion_width": IE_WIDTH_LIMIT,
        },
        "result": result,
    }


def _load(path: str) -> fam.BFamily:
    try:
        return fam.load_family(path)
    except (OSError, ValueError, KeyError) as exc:
        raise click.UsageError(f"cannot load family spec {path}: {exc}")


def _parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise click.UsageError(f"range must look like LO..HI, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise click.UsageError(f"range endpoints must be integers, got {text!r}")


def _parse_ints(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise click.UsageError(f"expected a comma-separated integer list, got {text!r}")


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ComputationalLimit as exc:
        click.echo(
            json.dumps({"error": {"kind": type(exc).__name__, "message": str(exc)}}),
            err=True,
        )
        sys.exit(1)
    except (BFreeError, ValueError) as exc:
        click.echo(
            json.dumps({"error": {"kind": type(exc).__name__, "message": str(exc)}}),
            err=True,
        )
        sys.exit(2)


@click.group()
@click.version_option(VERSION, prog_name="bfree")
def main():
    """Exact computations around B-free integers."""


@main.command()
@click.option("--family", "family_path", required=True, type=click.Path(exists=True))
@click.option("--range", "window_range", required=True, help="window LO..HI")
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv", "rle"]), default="text")
@click.option("--out", type=click.Path(), default=None)
def eta(family_path, window_range, fmt, out):
    """Dump the B-free indicator on an integer window."""
    B = _load(family_path)
    lo, hi = _parse_range(window_range)
    block = _guard(indicator_window, B, lo, hi)
    if fmt == "text":
        click.echo(" ".join(str(b) for b in block.bits))
    elif fmt == "csv":
        text = block.to_csv()
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
    elif fmt == "rle":
        click.echo(block.to_rle())
    else:
        _emit(
            _envelope(
                B,
                {"lo": lo, "hi": hi},
                {"offset": block.offset, "bits": list(block.bits)},
            ),
            out,
        )


@main.command()
@click.option("--family", "family_path", required=True, type=click.Path(exists=True))
@click.option("--thresholds", default="10,30,100,300,1000", help="filtration thresholds")
@click.option("--taut-depth", default=30, show_default=True)
@click.option("--light-tails-cutoff", default=100, show_default=True)
@click.option("--tolerance", default="0", help="regularity tolerance as NUM or NUM/DEN")
@click.option("--out", type=click.Path(), default=None)
def structure(family_path, thresholds, taut_depth, light_tails_cutoff, tolerance, out):
    """Run the full structural pipeline and report A_inf, B*, diagnostics."""
    B = _load(family_path)
    tol = Fraction(tolerance)
    ths = _parse_ints(thresholds)

    def run():
        filtration = st.standard_filtration(B, ths)
        report = st.build_structure_report(
            B,
            filtration,
            taut_truncation=taut_depth,
            light_tails_cutoff=light_tails_cutoff,
            tolerance=tol,
        )
        return report.to_json_dict()

    result = _guard(run)
    config = {
        "thresholds": list(ths),
        "taut_depth": taut_depth,
        "light_tails_cutoff": light_tails_cutoff,
        "tolerance": _rat(tol),
    }
    _emit(_envelope(B, config, result), out)


@main.command()
@click.option("--family", "family_path", required=True, type=click.Path(exists=True))
@click.option("--positions", required=True, help="positions LO..HI")
@click.option("--translates", default=20, show_default=True)
@click.option("--thresholds", default="10,30,100,300,1000")
@click.option("--out", type=click.Path(), default=None)
def toeplitz(family_path, positions, translates, thresholds, out):
    """Certify periodicity of the E-indicator at each requested position."""
    B = _load(family_path)
    lo, hi = _parse_range(positions)

    def run():
        filtration = st.standard_filtration(B, _parse_ints(thresholds))
        certs = []
        for i in range(lo, hi + 1):
            c = win.toeplitz_certify(B, i, filtration, translates)
            certs.append(
                {
                    "position": c.position,
                    "period": c.period,
                    "kind": c.kind,
                    "support": list(c.support),
                    "verified_translates": c.verified_translates,
                }
            )
        return {"certificates": certs}

    result = _guard(run)
    _emit(
        _envelope(B, {"lo": lo, "hi": hi, "translates": translates}, result), out
    )


@main.command()
@click.option("--family", "family_path", required=True, type=click.Path(exists=True))
@click.option("--filtration", "thresholds", default="10,30,100,300,1000", help="thresholds")
@click.option("--out", type=click.Path(), default=None)
def measure(family_path, thresholds, out):
    """Boundary-measure filtration and truncation densities."""
    B = _load(family_path)
    ths = _parse_ints(thresholds)

    def run():
        filtration = st.standard_filtration(B, ths)
        report = win.boundary_measure_filtration(B, filtration)
        de = st.davenport_erdos_delta(B, filtration)
        return {
            "boundary": report.to_json_dict(),
            "davenport_erdos": [_rat(t) for t in de],
            "davenport_erdos_float": [float(t) for t in de],
        }

    result = _guard(run)
    _emit(_envelope(B, {"thresholds": list(ths)}, result), out)


@main.command()
@click.option("--family", "family_path", required=True, type=click.Path(exists=True))
@click.option("--anchor", required=True, type=int)
@click.option("--radius", required=True, type=int)
@click.option("--flips", default="", help="comma-separated positions to force to 0")
@click.option("--protect", default="", help="comma-separated family members to pin")
@click.option("--scan-limit", default=hd.WITNESS_SCAN_LIMIT, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def witness(family_path, anchor, radius, flips, protect, scan_limit, out):
    """Construct and re-verify a flip witness for an integer anchor."""
    B = _load(family_path)
    flip_list = _parse_ints(flips)
    protect_list = _parse_ints(protect)

    def run():
        w = hd.construct_witness(
            B, anchor, radius, flip_list, protect_list, scan_limit=scan_limit
        )
        common = {
            "target": {"offset": w.target.offset, "bits": list(w.target.bits)},
            "anchor_support": list(w.anchor_support),
            "anchor_residue": {
                "residue": w.anchor_residue.residue,
                "modulus": w.anchor_residue.modulus,
            },
            "transcript": list(w.transcript),
        }
        if isinstance(w, hd.IntegerWitness):
            verification = hd.verify_integer_witness(B, w)
            return {
                "kind": "IntegerWitness",
                "value": w.value,
                "verification": verification,
                **common,
            }
        return {
            "kind": "CylinderWitness",
            "cylinder": {
                "support": list(w.cylinder.support),
                "residue": w.cylinder.residue.residue,
                "modulus": w.cylinder.residue.modulus,
            },
            "verified_to": w.verified_to,
            "exceptions": [asdict(c) for c in w.exceptions],
            **common,
        }

    result = _guard(run)
    config = {
        "anchor": anchor,
        "radius": radius,
        "flips": list(flip_list),
        "protect": list(protect_list),
        "scan_limit": scan_limit,
    }
    _emit(_envelope(B, config, result), out)


@main.command()
@click.option("--family", "family_path", required=True, type=click.Path(exists=True))
@click.option("--radius", required=True, type=int)
@click.option("--mode", type=click.Choice(["eta", "phi", "both"]), default="both")
@click.option("--range", "R", default=1000, show_default=True)
@click.option("--support", default="", help="support set for phi mode (default: members <= 30)")
@click.option("--upto", "K", default=10**4, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path(), default=None)
def blocks(family_path, radius, mode, R, support, K, fmt, out):
    """Enumerate block-language approximations (eta lower, phi upper)."""
    B = _load(family_path)
    supp = _parse_ints(support) or tuple(fam.enumerate_upto(B, 30))

    def run():
        result: dict = {}
        if mode in ("eta", "both"):
            lang = hd.block_language(B, radius, "eta", R=R)
            result["eta"] = sorted("".join(map(str, b.bits)) for b in lang)
        if mode in ("phi", "both"):
            lang = hd.block_language(B, radius, "phi", S=supp, K=K)
            result["phi"] = sorted("".join(map(str, b.bits)) for b in lang)
        if mode == "both":
            result["identical"] = result["eta"] == result["phi"]
            result["sandwich"] = set(result["eta"]) <= set(result["phi"])
        return result

    result = _guard(run)
    if fmt == "csv":
        lines = ["mode,word"]
        for key in ("eta", "phi"):
            for word in result.get(key, ()):  # type: ignore[union-attr]
                lines.append(f"{key},{word}")
        text = "\n".join(lines) + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
        return
    config = {"radius": radius, "mode": mode, "range": R, "support": list(supp), "upto": K}
    _emit(_envelope(B, config, result), out)


@main.command()
@click.option("--family", "family_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--samples", default=200, show_default=True)
@click.option("--window", default=500, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def diagnose(family_path, seed, samples, window, out):
    """Structural diagnostics plus exploratory inclusion evidence.

    The inclusion evidence (blocks seen in eta vs blocks allowed by phi)
    concerns possible strictness of the subshift inclusions; it is reported
    as observations only, no claim is attached.
    """
    B = _load(family_path)

    def run():
        rng = random.Random(seed)
        filtration = st.standard_filtration(B)
        report = st.build_structure_report(B, filtration)
        scales = st.a_infinity_scales(B)
        identity_checked = 0
        for _ in range(samples):
            n = rng.randint(-window, window)
            lhs = st.e_member(B, n)
            rhs = not fam.divides_member(B, n) and not any(n % a == 0 for a in scales)
            if lhs != rhs:
                raise AssertionError(f"E-identity fails at {n}")
            identity_checked += 1
        supp = tuple(fam.enumerate_upto(B, 30))
        evidence = {}
        if supp:
            try:
                eta_lang = hd.block_language(B, 2, "eta", R=window * 10)
                phi_lang = hd.block_language(B, 2, "phi", S=supp, K=10**4)
                evidence = {
                    "eta_block_count": len(eta_lang),
                    "phi_block_count": len(phi_lang),
                    "sandwich_holds": eta_lang <= phi_lang,
                    "gap_words": sorted(
                        "".join(map(str, b.bits)) for b in (phi_lang - eta_lang)
                    )[:32],
                    "note": "upper-approximation gap; no strictness claim",
                }
            except ComputationalLimit as exc:
                evidence = {"skipped": str(exc)}
        return {
            "structure": report.to_json_dict(),
            "e_identity_samples": identity_checked,
            "certificate_discovery_on_b_star": fam.discover_certificates(
                st.b_star(B), max_scale=20, depth=10
            ),
            "inclusion_evidence": evidence,
        }

    result = _guard(run)
    _emit(_envelope(B, {"seed": seed, "samples": samples, "window": window}, result), out)


if __name__ == "__main__":
    main()
