"""Command-line front end: ``hexamir {gen,search,msa,conserve,intersect}``.

Exit status is 0 on success, 2 on I/O errors and 3 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .align import ScoringScheme
from .conservation import (
    conservation_profile,
    conservation_stats,
    conserved_blocks,
    default_tau,
    detect_multi_region,
    format_anomalies,
    format_blocks,
    format_localizations,
    format_stats,
    localize_mature,
)
from .exceptions import ValidationError
from .msa import (
    align_sequences,
    extract_clusters,
    format_aligned_fasta,
    format_clustal,
    format_clusters,
    parse_aligned_fasta,
)
from .search import SearchParams, Strand, build_index, format_hits, format_tally, search
from .seqio import Kind, SeqRecord, assemble_corpus, format_fasta, read_annotations, read_fasta
from .setops import format_matrix, format_venn, venn
from .synth import format_manifest, parse_plant, synthetic_genome

EXIT_IO = 2
EXIT_VALIDATION = 3


def _scheme(args) -> ScoringScheme:
    try:
        return ScoringScheme(args.match, args.mismatch, args.gap_open, args.gap_extend)
    except ValueError as e:
        raise ValidationError(str(e)) from None


def _write(out: Path, name: str, text: str):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _write_json(args, name: str, doc):
    if args.json:
        _write(Path(args.out), name, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_gen(args) -> int:
    plants = [parse_plant(p) for p in args.plant]
    genome = synthetic_genome(args.length, args.seed, plants)
    rec = SeqRecord(args.name, "", Kind.GENOME, genome, f"seed={args.seed} length={args.length}")
    out = Path(args.out)
    _write(out, "genome.fa", format_fasta([rec]))
    _write(out, "plants.tsv", f"# seed={args.seed} length={args.length}\n" + format_manifest(plants))
    _write_json(args, "plants.json", {
        "seed": args.seed, "length": args.length,
        "plants": [{"offset": p.offset, "end": p.end, "strand": p.strand.value,
                    "mutations": list(p.mutations), "planted": p.planted_sequence()} for p in plants],
    })
    return 0


def cmd_search(args) -> int:
    queries = read_fasta(args.queries)
    if not queries:
        raise ValidationError("no queries")
    anns = read_annotations(args.annotations) if args.annotations else []
    corpus = assemble_corpus(queries, anns)
    subjects = read_fasta(args.subject, kind=Kind.GENOME)
    if not subjects:
        raise ValidationError("no subject sequences")
    strands = {
        "both": (Strand.FORWARD, Strand.REVERSE_COMPLEMENT),
        "+": (Strand.FORWARD,),
        "-": (Strand.REVERSE_COMPLEMENT,),
    }[args.strands]
    params = SearchParams(
        word_size=args.word_size, e_cutoff=args.e_cutoff, scheme=_scheme(args),
        x_drop=args.x_drop, strands=strands, k=args.k, gapped=args.gapped, workers=args.workers,
    )
    print(f"# {params.header()}", file=sys.stderr)
    reports = [search(corpus, s, params, index=build_index(s.residues, params.word_size)) for s in subjects]
    out = Path(args.out)
    _write(out, "hits.tsv", format_hits(reports, params))
    _write(out, "tally.tsv", format_tally(reports, params))
    _write_json(args, "hits.json", {
        "params": params.header(),
        "subjects": [{
            "subject_id": rep.subject_id,
            "tally": {c.value: n for c, n in rep.tally.items()},
            "results": [_hit_doc(r) for r in rep.results],
        } for rep in reports],
    })
    return 0


def _hit_doc(r):
    doc = {"query_id": r.query_id, "class": r.match_class.value}
    h = r.best
    if h is not None:
        doc.update(
            subject_id=h.subject_id, strand=h.strand.value, q_start=h.q_start, q_end=h.q_end,
            s_start=h.s_start, s_end=h.s_end, score=h.score, evalue=h.e_value,
            mismatches=h.alignment.mismatches, gaps=h.alignment.gap_columns, mature_id=h.mature_id,
        )
    return doc


def cmd_msa(args) -> int:
    seqs = read_fasta(args.input)
    if len(seqs) < 2:
        raise ValidationError("msa needs at least two sequences")
    msa, tree, _ = align_sequences(seqs, _scheme(args), args.workers)
    clusters = extract_clusters(tree, args.min_cluster, args.max_cluster)
    out = Path(args.out)
    _write(out, "msa.fasta", format_aligned_fasta(msa))
    _write(out, "msa.aln", format_clustal(msa))
    _write(out, "tree.nwk", tree.to_newick() + "\n")
    _write(out, "clusters.tsv", f"# min_cluster={args.min_cluster} max_cluster={args.max_cluster}\n" + format_clusters(clusters))
    _write_json(args, "msa.json", {
        "rows": dict(zip(msa.ids, msa.rows)),
        "tree": tree.to_newick(),
        "clusters": [{"ids": list(c.ids), "undersized": c.undersized} for c in clusters],
    })
    return 0


def cmd_conserve(args) -> int:
    scheme = _scheme(args)
    families = []
    for path in args.input:
        path = Path(path)
        if args.aligned:
            msa = parse_aligned_fasta(path.read_text())
        else:
            seqs = read_fasta(path)
            if len(seqs) < 2:
                raise ValidationError(f"{path}: a family needs at least two sequences")
            msa, _, _ = align_sequences(seqs, scheme, args.workers)
        families.append((path.stem, msa))

    anns = read_annotations(args.annotations)
    row_family = {rid: (name, msa) for name, msa in families for rid in msa.ids}
    resolved = [a for a in anns if a.precursor_id in row_family]
    for a in anns:
        if a.precursor_id not in row_family:
            print(f"warning: {a.mature_id}: precursor {a.precursor_id} is not in any alignment", file=sys.stderr)
    if not resolved:
        raise ValidationError("no annotations resolve to alignment rows")

    block_text, loc_all, anomalies, docs = [], [], [], []
    out = Path(args.out)
    for name, msa in families:
        tau = default_tau(len(msa)) if args.tau is None else args.tau
        blocks = conserved_blocks(
            conservation_profile(msa), tau, args.lmin, msa=msa, flank=args.flank,
            max_gap_fraction=args.max_gap_fraction,
        )
        locs = [localize_mature(msa, blocks, a, name) for a in resolved if row_family[a.precursor_id][0] == name]
        loc_all.extend(locs)
        anomalies.extend(detect_multi_region(blocks, locs, name))
        block_text.append(format_blocks(name, blocks, msa))
        if not args.aligned:
            _write(out, f"{name}.msa.fasta", format_aligned_fasta(msa))
        docs.append({
            "family": name, "tau": tau,
            "blocks": [{"start": b.start_col, "end": b.end_col, "mean_score": b.mean_score,
                        "rows": b.per_row_subsequences} for b in blocks],
        })
    header = (
        f"# tau={'auto' if args.tau is None else args.tau} lmin={args.lmin} "
        f"flank={args.flank} max_gap_fraction={args.max_gap_fraction}\n"
    )
    stats = conservation_stats(loc_all)
    # column headers once, then the body lines of every family
    block_lines = block_text[0].splitlines()[:2]
    for t in block_text:
        block_lines += [line for line in t.splitlines() if not line.startswith("#")]
    _write(out, "blocks.tsv", header + "\n".join(block_lines) + "\n")
    _write(out, "localizations.tsv", header + format_localizations(loc_all))
    _write(out, "stats.tsv", header + format_stats(stats))
    _write(out, "anomalies.tsv", header + format_anomalies(anomalies))
    _write_json(args, "conserve.json", {
        "families": docs,
        "localizations": [{"mature_id": l.mature_id, "family": l.family, "relation": l.relation.value,
                           "block_index": l.block_index, "offset": l.offset} for l in loc_all],
        "stats": {"inside_pct": stats.inside_pct, "near_pct": stats.near_pct,
                  "outside_pct": stats.outside_pct, "n": stats.n},
    })
    return 0


def cmd_intersect(args) -> int:
    records = []
    if args.matures:
        records += read_fasta(args.matures, kind=Kind.MATURE)
    if args.precursors:
        records += read_fasta(args.precursors, kind=Kind.PRECURSOR)
    anns = read_annotations(args.annotations) if args.annotations else []
    corpus = assemble_corpus(records, anns)
    report = venn(corpus, args.species, args.tolerance)
    out = Path(args.out)
    _write(out, "matrix.tsv", format_matrix(report))
    _write(out, "venn.tsv", format_venn(report))
    _write_json(args, "intersect.json", {
        "species": list(report.species), "tolerance": report.tolerance,
        "regions": {"+".join(s): c for s, c in report.region_counts.items()},
        "pairwise": report.pairwise_matrix.tolist(),
    })
    return 0


def _add_scheme(p):
    g = p.add_argument_group("scoring")
    g.add_argument("--match", type=int, default=5)
    g.add_argument("--mismatch", type=int, default=-4)
    g.add_argument("--gap-open", type=int, default=10)
    g.add_argument("--gap-extend", type=int, default=1)


def _add_common(p):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--json", action="store_true", help="also write JSON mirrors of the reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hexamir", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic genome with planted motifs")
    _add_common(p)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--length", type=int, default=100_000)
    p.add_argument("--name", default="synthetic")
    p.add_argument("--plant", action="append", default=[], metavar="SEQ:OFFSET[:STRAND[:POS,...]]")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("search", help="seed-and-extend search of queries against subjects")
    _add_common(p)
    p.add_argument("--queries", required=True)
    p.add_argument("--annotations")
    p.add_argument("--subject", required=True)
    p.add_argument("--word-size", type=int, default=7)
    p.add_argument("--e-cutoff", type=float, default=10.0)
    p.add_argument("--x-drop", type=int, default=20)
    p.add_argument("--k", type=float, default=0.1)
    p.add_argument("--strands", choices=["both", "+", "-"], default="both")
    p.add_argument("--gapped", action="store_true", help="rescore survivors with gapped local alignment")
    p.add_argument("--workers", type=int, default=1)
    _add_scheme(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("msa", help="progressive multiple alignment, guide tree and clusters")
    _add_common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--min-cluster", type=int, default=8)
    p.add_argument("--max-cluster", type=int, default=27)
    p.add_argument("--workers", type=int, default=1)
    _add_scheme(p)
    p.set_defaults(func=cmd_msa)

    p = sub.add_parser("conserve", help="conserved blocks and mature localization")
    _add_common(p)
    p.add_argument("--input", required=True, nargs="+", help="one FASTA per family")
    p.add_argument("--aligned", action="store_true", help="inputs are already aligned")
    p.add_argument("--annotations", required=True)
    p.add_argument("--tau", type=float, default=None, help="default: 0.66 for <= 3 rows, else 0.9")
    p.add_argument("--lmin", type=int, default=15)
    p.add_argument("--flank", type=float, default=0.85, help="minimum score of a block's end columns")
    p.add_argument("--max-gap-fraction", type=float, default=0.0, help="columns with more gaps never join a block")
    p.add_argument("--workers", type=int, default=1)
    _add_scheme(p)
    p.set_defaults(func=cmd_conserve)

    p = sub.add_parser("intersect", help="shared matures between species")
    _add_common(p)
    p.add_argument("--matures")
    p.add_argument("--precursors")
    p.add_argument("--annotations")
    p.add_argument("--species", nargs="+", required=True)
    p.add_argument("--tolerance", type=int, default=0)
    p.set_defaults(func=cmd_intersect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
