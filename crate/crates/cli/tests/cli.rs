use isf_cli::{run, EXIT_DATA, EXIT_OK, EXIT_UNREADABLE, EXIT_USAGE};
use isf_core::io::{read_metrics_csv, read_pnm_labels, write_pnm, PnmImage, PnmKind};
use std::path::Path;

fn two_region_ppm(w: usize, h: usize) -> Vec<u8> {
    let mut samples = Vec::with_capacity(w * h * 3);
    for _y in 0..h {
        for x in 0..w {
            let v = if x < w / 2 { 30 } else { 220 };
            samples.extend([v, v, v]);
        }
    }
    write_pnm(&PnmImage::new(PnmKind::P6, w, h, 255, samples).unwrap())
}

fn gt_pgm(w: usize, h: usize) -> Vec<u8> {
    let samples = (0..w * h).map(|i| if i % w < w / 2 { 1 } else { 2 }).collect();
    write_pnm(&PnmImage::new(PnmKind::P5, w, h, 255, samples).unwrap())
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["isf"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn missing_input_is_unreadable() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("l.pgm");
    let (code, _, err) =
        invoke(&["segment", "--input", "/nonexistent/x.ppm", "--superpixels", "4", "--labels", p(&labels)]);
    assert_eq!(code, EXIT_UNREADABLE);
    assert!(err.contains("x.ppm"));
}

#[test]
fn garbage_input_is_unreadable() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.ppm");
    std::fs::write(&input, b"P7 nonsense").unwrap();
    let labels = dir.path().join("l.pgm");
    let (code, _, _) = invoke(&["segment", "--input", p(&input), "--superpixels", "4", "--labels", p(&labels)]);
    assert_eq!(code, EXIT_UNREADABLE);
}

#[test]
fn invalid_parameters_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.ppm");
    std::fs::write(&input, two_region_ppm(8, 8)).unwrap();
    let labels = dir.path().join("l.pgm");
    let (code, _, _) = invoke(&["segment", "--input", p(&input), "--superpixels", "0", "--labels", p(&labels)]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = invoke(&["segment", "--input", p(&input), "--superpixels", "4", "--alpha", "-1", "--labels", p(&labels)]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = invoke(&["segment", "--input", p(&input), "--superpixels", "4"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn metrics_dimension_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pgm");
    let b = dir.path().join("b.pgm");
    std::fs::write(&a, gt_pgm(8, 8)).unwrap();
    std::fs::write(&b, gt_pgm(8, 6)).unwrap();
    let (code, _, _) = invoke(&["metrics", "--labels", p(&a), "--gt", p(&b)]);
    assert_eq!(code, EXIT_DATA);
}

#[test]
fn segment_writes_labels_overlay_seeds_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.ppm");
    let gt = dir.path().join("gt.pgm");
    std::fs::write(&input, two_region_ppm(32, 32)).unwrap();
    std::fs::write(&gt, gt_pgm(32, 32)).unwrap();
    let labels = dir.path().join("l.pgm");
    let overlay = dir.path().join("o.ppm");
    let seeds = dir.path().join("s.csv");
    let (code, out, err) = invoke(&[
        "segment", "--input", p(&input), "--superpixels", "8", "--method", "grid-root", "--labels", p(&labels),
        "--overlay", p(&overlay), "--gt", p(&gt), "--seed-dump", p(&seeds), "--verbose",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(err.contains("iteration 1"));
    let rows = read_metrics_csv(out.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].br, Some(1.0));
    let map = read_pnm_labels(&std::fs::read(&labels).unwrap()).unwrap();
    assert_eq!(map.dims(), [32, 32, 1]);
    let dump = std::fs::read_to_string(&seeds).unwrap();
    assert!(dump.starts_with("label,x,y,z\n"));
    assert_eq!(dump.lines().count(), map.max_label() as usize + 1);
    assert!(std::fs::read(&overlay).unwrap().starts_with(b"P6"));
}

#[test]
fn regmin_on_constant_image_yields_one_superpixel() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.pgm");
    let img = PnmImage::new(PnmKind::P5, 16, 16, 255, vec![77; 256]).unwrap();
    std::fs::write(&input, write_pnm(&img)).unwrap();
    let labels = dir.path().join("l.pgm");
    let (code, _, err) =
        invoke(&["segment", "--input", p(&input), "--superpixels", "9", "--method", "regmin", "--labels", p(&labels)]);
    assert_eq!(code, EXIT_OK, "{err}");
    let map = read_pnm_labels(&std::fs::read(&labels).unwrap()).unwrap();
    assert_eq!(map.max_label(), 1);
    assert!(map.labels().iter().all(|&l| l == 1));
}

#[test]
fn f32_precision_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.ppm");
    std::fs::write(&input, two_region_ppm(16, 16)).unwrap();
    let labels = dir.path().join("l.pgm");
    let (code, _, err) = invoke(&[
        "segment", "--input", p(&input), "--superpixels", "4", "--precision", "f32", "--labels", p(&labels),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
}

#[test]
fn bench_over_directory_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir(&images).unwrap();
    std::fs::write(images.join("b.ppm"), two_region_ppm(16, 16)).unwrap();
    std::fs::write(images.join("a.ppm"), two_region_ppm(16, 16)).unwrap();
    std::fs::write(images.join("notes.txt"), b"ignored").unwrap();
    let table = dir.path().join("bench.csv");
    let (code, _, err) = invoke(&[
        "bench", "--input", p(&images), "--superpixels", "4,8", "--alpha", "0.1,0.5", "--iters", "2", "--out",
        p(&table),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let rows = read_metrics_csv(&std::fs::read(&table).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows[..4].iter().all(|r| r.image.ends_with("a.ppm")));
    assert!(rows[4..].iter().all(|r| r.image.ends_with("b.ppm")));
    assert!(rows.iter().all(|r| r.seconds.is_some() && r.br.is_none()));
    assert_eq!(rows[1].alpha, Some(0.5));
}

#[test]
fn sky_mask_covers_the_bright_top() {
    let dir = tempfile::tempdir().unwrap();
    let (w, h) = (32, 32);
    let mut samples = Vec::new();
    for y in 0..h {
        for _x in 0..w {
            let px: [u16; 3] = if y < 12 { [120, 170, 240] } else { [60, 90, 40] };
            samples.extend(px);
        }
    }
    let input = dir.path().join("s.ppm");
    std::fs::write(&input, write_pnm(&PnmImage::new(PnmKind::P6, w, h, 255, samples).unwrap())).unwrap();
    let out = dir.path().join("mask.pgm");
    let (code, _, err) =
        invoke(&["sky", "--input", p(&input), "--superpixels", "16", "--threshold", "5", "--out", p(&out)]);
    assert_eq!(code, EXIT_OK, "{err}");
    let mask = isf_core::io::read_pnm(&std::fs::read(&out).unwrap()).unwrap();
    for y in 0..h {
        for x in 0..w {
            let set = mask.samples[y * w + x] == 255;
            assert_eq!(set, y < 12, "({x},{y})");
        }
    }
}
