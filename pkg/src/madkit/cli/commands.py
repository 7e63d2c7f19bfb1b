"""Implementations of the madkit subcommands.

Every command is a deterministic function of its inputs and the seed:
outputs carry the run-record hash and identical invocations reproduce
identical bytes. Batch stages accept --jobs and merge results in sorted
order, so parallelism never changes outputs.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ..core.errors import EmptyClassError, FormatError, MadkitError, ManifestError
from ..core.manifest import load_manifest, manifest_to_dict, validate_manifest
from ..core.images import load_png, save_png, to_grayscale
from ..core.types import Orientation, PostProcessing, ScoreSet
from ..degrade import FILENAME_SUFFIX, DegradeConfig, apply_chain
from ..features import (
    FeatureDataset,
    SyntheticConfig,
    build_difference_dataset,
    build_synthetic_manifest,
    combine_difference,
    cosine_similarity,
    dataset_to_text,
    embeddings_to_text,
    landmark_features,
    lbp_histogram,
    bsif_histogram,
    load_dataset,
    load_embeddings,
    load_filter_bank,
    synthesize_embeddings,
    synthetic_filter_bank,
)
from ..metrics import (
    classical_mds,
    detection_report,
    score_histograms,
    vulnerability_report,
)
from ..classify import SvmParams, load_model, save_model, train
from ..morph import (
    MorphParams,
    augment_landmarks,
    demorph,
    load_landmarks,
    morph,
    save_landmarks,
)
from ..protocol import (
    derive_morphs,
    enumerate_comparisons,
    load_comparisons,
    save_comparisons,
)
from .runrecord import RunContext


def _require_valid(manifest, name="manifest"):
    violations = validate_manifest(manifest)
    if violations:
        lines = "\n".join(f"  {v}" for v in violations)
        raise ManifestError(f"{name} has {len(violations)} rule violation(s):\n{lines}")
    return manifest


def _manifest_text(manifest, comment):
    import yaml
    body = yaml.safe_dump(manifest_to_dict(manifest), sort_keys=False,
                          default_flow_style=False, allow_unicode=True)
    return f"{comment}\n{body}"


# ---------------------------------------------------------------- synth

def cmd_synth(args):
    cfg = SyntheticConfig(dim=args.dim, identities=args.identities,
                          refs_per_identity=args.refs,
                          inputs_per_identity=args.inputs,
                          probes_per_identity=args.probes,
                          sigma=args.sigma, alpha=args.alpha, seed=args.seed)
    with RunContext("synth", args.out, vars(args), {}) as run:
        manifest = build_synthetic_manifest(cfg, id_prefix=args.prefix)
        _require_valid(manifest, "generated manifest")
        store = synthesize_embeddings(cfg, manifest)
        run.path("manifest.yaml").write_text(
            _manifest_text(manifest, run.comment), encoding="utf-8")
        run.write_text("embeddings.txt", embeddings_to_text(store))
        print(f"synth: {cfg.identities} identities, {len(store)} embeddings "
              f"-> {run.out_dir}")
    return 0


# ------------------------------------------------------------- protocol

def cmd_protocol(args):
    manifest = load_manifest(args.manifest)
    params = {k: v for k, v in vars(args).items() if k != "func"}
    with RunContext("protocol", args.out, params,
                    {"manifest": args.manifest}) as run:
        if args.derive_morphs:
            manifest = derive_morphs(manifest, tool=args.tool, alpha=args.alpha)
            run.path("manifest.yaml").write_text(
                _manifest_text(manifest, run.comment), encoding="utf-8")
        _require_valid(manifest)
        comparisons = enumerate_comparisons(manifest, contributors=args.contributors)
        save_comparisons(comparisons, run.path("comparisons.csv"),
                         comment=f"run={run.run_hash}")
        print(f"protocol: genuine={len(comparisons.genuine)} "
              f"impostor={len(comparisons.impostor)} "
              f"attacks={len(comparisons.attacks)} -> {run.out_dir}")
    return 0


# ---------------------------------------------------------------- morph

def _load_image_and_landmarks(images_dir, landmarks_dir, image_id):
    img = load_png(Path(images_dir) / f"{image_id}.png")
    lm = load_landmarks(Path(landmarks_dir) / f"{image_id}.lm")
    h, w = img.shape[:2]
    return img, augment_landmarks(lm, w, h, idempotent=True)


def _morph_one(task):
    images_dir, landmarks_dir, pair_a, pair_b, alpha, reblend, background = task
    img_a, lm_a = _load_image_and_landmarks(images_dir, landmarks_dir, pair_a)
    img_b, lm_b = _load_image_and_landmarks(images_dir, landmarks_dir, pair_b)
    params = MorphParams(alpha=alpha, reblend_regions=reblend,
                         replace_background=background)
    return morph(img_a, img_b, lm_a, lm_b, params)


def cmd_morph(args):
    manifest = _require_valid(load_manifest(args.manifest))
    params = {k: v for k, v in vars(args).items() if k != "func"}
    with RunContext("morph", args.out, params,
                    {"manifest": args.manifest, "images": args.images,
                     "landmarks": args.landmarks}) as run:
        tasks = [(args.images, args.landmarks, m.a, m.b, m.alpha,
                  args.reblend_regions, args.replace_background)
                 for m in manifest.morphs]
        ids = [m.morph_id for m in manifest.morphs]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                outputs = list(pool.map(_morph_one, tasks))
        else:
            outputs = [_morph_one(t) for t in tasks]
        for morph_id, img in sorted(zip(ids, outputs)):
            save_png(img, run.path(f"{morph_id}.png"), text={"run": run.run_hash})
        print(f"morph: {len(ids)} morphs -> {run.out_dir}")
    return 0


def cmd_demorph(args):
    params = {k: v for k, v in vars(args).items() if k != "func"}
    with RunContext("demorph", args.out, params,
                    {"reference": args.reference, "probe": args.probe,
                     "ref_landmarks": args.ref_landmarks,
                     "probe_landmarks": args.probe_landmarks}) as run:
        ref = load_png(args.reference)
        probe = load_png(args.probe)
        h, w = ref.shape[:2]
        lm_ref = augment_landmarks(load_landmarks(args.ref_landmarks), w, h,
                                   idempotent=True)
        lm_probe = augment_landmarks(load_landmarks(args.probe_landmarks), w, h,
                                     idempotent=True)
        out, lm_out = demorph(ref, lm_ref, probe, lm_probe, args.factor)
        save_png(out, run.path("demorphed.png"), text={"run": run.run_hash})
        save_landmarks(lm_out, run.path("demorphed.lm"))
        print(f"demorph: factor={args.factor} -> {run.out_dir}")
    return 0


# -------------------------------------------------------------- degrade

def _degrade_one(task):
    path, mode, target_bytes, noise_sigma, texture_amplitude, texture_scale, \
        median_radius, seed = task
    cfg = DegradeConfig(mode=PostProcessing(mode), target_bytes=target_bytes,
                        noise_sigma=noise_sigma,
                        texture_amplitude=texture_amplitude,
                        texture_scale=texture_scale,
                        median_radius=median_radius, seed=seed)
    img = load_png(path)
    result = apply_chain(img, cfg)
    return Path(path).stem, result


def cmd_degrade(args):
    params = {k: v for k, v in vars(args).items() if k != "func"}
    with RunContext("degrade", args.out, params, {"images": args.images}) as run:
        pngs = sorted(Path(args.images).glob("*.png"))
        if not pngs:
            raise FormatError(f"no .png images in {args.images}")
        tasks = [(str(p), args.mode, args.target_bytes, args.noise_sigma,
                  args.texture_amplitude, args.texture_scale,
                  args.median_radius, args.seed) for p in pngs]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_degrade_one, tasks))
        else:
            results = [_degrade_one(t) for t in tasks]
        suffix = FILENAME_SUFFIX[PostProcessing(args.mode)]
        ext = {"jp2": "jp2", "jpeg": "jpg"}
        for stem, result in sorted(results, key=lambda r: r[0]):
            save_png(result.image, run.path(f"{stem}{suffix}.png"),
                     text={"run": run.run_hash})
            if result.encoded is not None:
                run.write_bytes(f"{stem}{suffix}.{ext[result.codec]}",
                                result.encoded)
                run.write_json(f"{stem}{suffix}.json", {
                    "codec": result.codec, "quality": result.quality,
                    "bytes": result.byte_size, "seed": result.seed,
                    "mode": result.mode.value,
                })
        print(f"degrade: {len(results)} images ({args.mode}) -> {run.out_dir}")
    return 0


# ------------------------------------------------------------- features

def _texture_feature(img, mode, cells, bank):
    gray = to_grayscale(img)
    if mode == "lbp":
        hist = lbp_histogram(gray, cells=cells)
    else:
        hist = bsif_histogram(gray, bank, cells=cells)
    return hist / hist.sum()


def cmd_features(args):
    comparisons = load_comparisons(args.comparisons)
    params = {k: v for k, v in vars(args).items() if k != "func"}
    inputs = {"comparisons": args.comparisons}
    for name in ("embeddings", "ref_images", "probe_images", "ref_landmarks",
                 "probe_landmarks", "bank"):
        value = getattr(args, name, None)
        if value:
            inputs[name] = value
    with RunContext("features", Path(args.out).parent, params, inputs,
                    record_name=f"{Path(args.out).name}.run.json") as run:
        if args.mode == "difference":
            store = load_embeddings(args.embeddings)
            ds = build_difference_dataset(store, comparisons)
        elif args.mode in ("lbp", "bsif"):
            bank = None
            if args.mode == "bsif":
                bank = (load_filter_bank(args.bank) if args.bank
                        else synthetic_filter_bank())
            cache: dict[str, np.ndarray] = {}

            def feat(directory, image_id):
                key = f"{directory}/{image_id}"
                if key not in cache:
                    img = load_png(Path(directory) / f"{image_id}.png")
                    cache[key] = _texture_feature(img, args.mode, args.cells, bank)
                return cache[key]

            X, y, rows = [], [], []
            for ref_id, probe_id, _ in comparisons.genuine:
                X.append(combine_difference(feat(args.ref_images, ref_id),
                                            feat(args.probe_images, probe_id)))
                y.append(-1.0)
                rows.append(("bona-fide", ref_id, probe_id))
            for morph_id, probe_id, _ in comparisons.attacks:
                X.append(combine_difference(feat(args.ref_images, morph_id),
                                            feat(args.probe_images, probe_id)))
                y.append(1.0)
                rows.append(("attack", morph_id, probe_id))
            ds = FeatureDataset(X=np.array(X), y=np.array(y), rows=rows,
                                source=f"{args.mode}-cells{args.cells}")
        elif args.mode == "landmarks":
            def lms(directory, image_id):
                return load_landmarks(Path(directory) / f"{image_id}.lm")

            X, y, rows = [], [], []
            for ref_id, probe_id, _ in comparisons.genuine:
                X.append(landmark_features(lms(args.ref_landmarks, ref_id),
                                           lms(args.probe_landmarks, probe_id),
                                           mode=args.lm_mode))
                y.append(-1.0)
                rows.append(("bona-fide", ref_id, probe_id))
            for morph_id, probe_id, _ in comparisons.attacks:
                X.append(landmark_features(lms(args.ref_landmarks, morph_id),
                                           lms(args.probe_landmarks, probe_id),
                                           mode=args.lm_mode))
                y.append(1.0)
                rows.append(("attack", morph_id, probe_id))
            ds = FeatureDataset(X=np.array(X), y=np.array(y), rows=rows,
                                source=f"landmarks-{args.lm_mode}")
        else:
            raise MadkitError(f"unknown feature mode {args.mode!r}")
        run.register(args.out)
        Path(args.out).write_text(f"{run.comment}\n{dataset_to_text(ds)}",
                                  encoding="utf-8")
        print(f"features: {len(ds.X)} rows (dim {ds.dim}) -> {args.out}")
    return 0


# ----------------------------------------------------------- train/score

def cmd_train(args):
    if args.test_manifest and not args.allow_overlap:
        train_subjects = {s.id for s in load_manifest(args.manifest).subjects}
        test_subjects = {s.id for s in load_manifest(args.test_manifest).subjects}
        shared = sorted(train_subjects & test_subjects)
        if shared:
            raise MadkitError(
                f"train/test manifests share {len(shared)} subject id(s), "
                f"e.g. {shared[:3]}; pass --allow-overlap to override")
    ds = load_dataset(args.features)
    params = SvmParams(C=args.C, gamma=("auto" if args.gamma == "auto"
                                        else float(args.gamma)),
                       tol=args.tol,
                       calibration_holdout=args.calibration_holdout)
    cli_params = {k: v for k, v in vars(args).items() if k != "func"}
    inputs = {"features": args.features, "manifest": args.manifest}
    if args.test_manifest:
        inputs["test_manifest"] = args.test_manifest
    with RunContext("train", Path(args.model).parent, cli_params, inputs,
                    record_name=f"{Path(args.model).name}.run.json") as run:
        model = train(ds.X, ds.y, params, seed=args.seed, extractor=ds.source,
                      standardize=args.standardize)
        model.metadata["run"] = run.run_hash
        run.register(args.model)
        save_model(model, args.model)
        print(f"train: {len(ds.X)} samples, "
              f"{len(model.support_vectors)} support vectors, "
              f"gamma={model.gamma:.6g} -> {args.model}")
    return 0


def cmd_score(args):
    model = load_model(args.model)
    ds = load_dataset(args.features)
    params = {k: v for k, v in vars(args).items() if k != "func"}
    with RunContext("score", Path(args.out).parent, params,
                    {"model": args.model, "features": args.features},
                    record_name=f"{Path(args.out).name}.run.json") as run:
        scores = model.score_batch(ds.X)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["label", "ref_id", "probe_id", "score"])
        for (label, ref_id, probe_id), score in zip(ds.rows, scores):
            writer.writerow([label, ref_id, probe_id, f"{score:.17g}"])
        run.register(args.out)
        Path(args.out).write_text(f"{run.comment}\n{buf.getvalue()}",
                                  encoding="utf-8")
        print(f"score: {len(scores)} comparisons -> {args.out}")
    return 0


def load_scores_csv(path) -> ScoreSet:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [l for l in fh if not l.startswith("#")]
    reader = csv.DictReader(lines)
    scores, labels = [], []
    for row in reader:
        try:
            scores.append(float(row["score"]))
            labels.append(row["label"])
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"{path}: malformed score row {row}") from None
    if not scores:
        raise FormatError(f"{path}: no score rows")
    return ScoreSet(np.array(scores), np.array(labels, dtype=object),
                    Orientation.HIGHER_IS_ATTACK)


# ------------------------------------------------------------------ eval

def cmd_eval(args):
    scores = load_scores_csv(args.scores)
    if len(scores.attack) == 0:
        raise EmptyClassError("score file has no attack rows")
    if len(scores.bona_fide) == 0:
        raise EmptyClassError("score file has no bona fide rows")
    params = {k: v for k, v in vars(args).items() if k != "func"}
    with RunContext("eval", args.out, params, {"scores": args.scores}) as run:
        report = detection_report(scores, bpcer_target=args.bpcer_target)
        run.write_json("report.json", {
            "deer": report.deer,
            "deer_threshold": report.deer_threshold,
            "bpcer10": report.bpcer10,
            "bpcer10_threshold": report.bpcer10_threshold,
            "bpcer_target": args.bpcer_target,
            "n_bona_fide": int(len(scores.bona_fide)),
            "n_attack": int(len(scores.attack)),
        })
        curve_lines = ["threshold,apcer,bpcer"]
        for tau, a, b in zip(report.thresholds, report.apcer, report.bpcer):
            curve_lines.append(f"{tau:.17g},{a:.17g},{b:.17g}")
        run.write_text("det_curve.csv", "\n".join(curve_lines) + "\n")
        hist_lines = ["label,bin_lo,bin_hi,mass"]
        kde_lines = ["label,score,density"]
        for cd in score_histograms(scores, bins=args.bins):
            for lo, hi, mass in zip(cd.bin_edges[:-1], cd.bin_edges[1:], cd.masses):
                hist_lines.append(f"{cd.label},{lo:.17g},{hi:.17g},{mass:.17g}")
            for x, d in zip(cd.grid, cd.density):
                kde_lines.append(f"{cd.label},{x:.17g},{d:.17g}")
        run.write_text("histograms.csv", "\n".join(hist_lines) + "\n")
        run.write_text("kde.csv", "\n".join(kde_lines) + "\n")
        print(f"eval: D-EER={report.deer * 100:.2f}% "
              f"BPCER{int(args.bpcer_target * 100)}={report.bpcer10 * 100:.2f}% "
              f"-> {run.out_dir}")
    return 0


# ------------------------------------------------------------------ vuln

def cmd_vuln(args):
    manifest = _require_valid(load_manifest(args.manifest))
    store = load_embeddings(args.embeddings)
    params = {k: v for k, v in vars(args).items() if k != "func"}
    with RunContext("vuln", args.out, params,
                    {"manifest": args.manifest,
                     "embeddings": args.embeddings}) as run:
        comparisons = enumerate_comparisons(manifest, contributors="both")
        genuine = [cosine_similarity(store[r], store[p])
                   for r, p, _ in comparisons.genuine]
        impostor = [cosine_similarity(store[r], store[p])
                    for r, p, _ in comparisons.impostor]
        groups: dict[str, dict[str, list[float]]] = {}
        for morph_id, probe_id, subject_id in comparisons.attacks:
            value = cosine_similarity(store[morph_id], store[probe_id])
            groups.setdefault(morph_id, {}).setdefault(subject_id, []).append(value)
        report = vulnerability_report(genuine, impostor, groups,
                                      fmr_target=args.fmr_target)
        owner = {img.id: s.id for s in manifest.subjects for img in s.images}
        attacker_scores = []
        for m in manifest.morphs:
            subj = owner[m.a]
            attacker_scores.extend(groups.get(m.morph_id, {}).get(subj, []))
        attacker_rate = (float(np.mean(np.asarray(attacker_scores)
                                       >= report.threshold))
                         if attacker_scores else None)
        run.write_json("vulnerability.json", {
            "fmr_target": args.fmr_target,
            "threshold": report.threshold,
            "fmr": report.fmr,
            "fnmr": report.fnmr,
            "mmpmr": report.mmpmr,
            "rmmr": report.rmmr,
            "per_comparison_rate": report.per_comparison_rate,
            "attacker_side_rate": attacker_rate,
            "n_genuine": len(genuine),
            "n_impostor": len(impostor),
            "n_morphs": len(groups),
        })
        rows = ["kind,ref_id,probe_id,subject_id,score"]
        for kind, triples in (("genuine", comparisons.genuine),
                              ("impostor", comparisons.impostor),
                              ("attack", comparisons.attacks)):
            for r, p, s in triples:
                rows.append(f"{kind},{r},{p},{s},"
                            f"{cosine_similarity(store[r], store[p]):.17g}")
        run.write_text("similarity_scores.csv", "\n".join(rows) + "\n")
        print(f"vuln: threshold={report.threshold:.4f} "
              f"MMPMR={report.mmpmr * 100:.1f}% RMMR={report.rmmr * 100:.1f}% "
              f"-> {run.out_dir}")
    return 0


# ------------------------------------------------------------------- mds

def cmd_mds(args):
    ds = load_dataset(args.features)
    params = {k: v for k, v in vars(args).items() if k != "func"}
    with RunContext("mds", Path(args.out).parent, params,
                    {"features": args.features},
                    record_name=f"{Path(args.out).name}.run.json") as run:
        result = classical_mds(ds.X, dims=2)
        lines = [run.comment]
        if result.rank_deficient:
            lines.append("# rank_deficient=true")
        lines.append("label,ref_id,probe_id,x,y")
        for (label, ref_id, probe_id), (x, y) in zip(ds.rows, result.coords):
            lines.append(f"{label},{ref_id},{probe_id},{x:.17g},{y:.17g}")
        run.register(args.out)
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"mds: {len(ds.X)} points -> {args.out}")
    return 0
