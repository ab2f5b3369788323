use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use hanzi_attr::codec::{build_lexicon, entry_indices, parse_dictionary, AttributeSchema};
use hanzi_attr::matcher::{argmax_onehot, recognize, PredictionSet, SetPrediction};
use hanzi_attr::segmentation::{segment_page, SegConfig};
use hanzi_attr::synth::{generate_page, PageSpec, BUNDLED_DICTIONARY};
use hanzi_attr_ffi::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ha_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn schema() -> *mut HaSchema {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ha_schema_default(&mut s) }, HaStatus::Ok);
    s
}

fn lexicon(schema: *const HaSchema) -> *mut HaLexicon {
    let dict = CString::new(BUNDLED_DICTIONARY).unwrap();
    let (mut lex, mut rejected) = (ptr::null_mut(), usize::MAX);
    assert_eq!(
        unsafe { ha_lexicon_from_dictionary(schema, dict.as_ptr(), &mut rejected, &mut lex) },
        HaStatus::Ok,
        "{}",
        last_error()
    );
    assert_eq!(rejected, 0);
    lex
}

#[test]
fn schema_handles() {
    let s = schema();
    let core = AttributeSchema::default_schema();
    unsafe {
        assert_eq!(ha_schema_dim(s), 511);
        assert_eq!(ha_schema_set_count(s), 23);
        assert_eq!(ha_schema_set_size(s, 0), core.sets()[0].len());
        assert_eq!(ha_schema_set_size(s, 23), 0);
        assert_eq!(CStr::from_ptr(ha_schema_id(s)).to_str().unwrap(), core.id().to_string());
        assert!(ha_schema_id(ptr::null()).is_null());
        assert_eq!(ha_schema_dim(ptr::null()), 0);

        let manifest = CString::new(core.to_manifest()).unwrap();
        let mut t = ptr::null_mut();
        assert_eq!(ha_schema_load(manifest.as_ptr(), &mut t), HaStatus::Ok);
        assert_eq!(CStr::from_ptr(ha_schema_id(t)), CStr::from_ptr(ha_schema_id(s)));
        ha_schema_free(t);
        ha_schema_free(s);
        ha_schema_free(ptr::null_mut());
    }
    assert!(!unsafe { CStr::from_ptr(ha_version()) }.to_bytes().is_empty());
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("x\tnot-a-group\ta\n").unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ha_schema_load(bad.as_ptr(), &mut s), HaStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(ha_schema_load(ptr::null(), &mut s), HaStatus::NullPointer);
        assert_eq!(ha_schema_default(ptr::null_mut()), HaStatus::NullPointer);

        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(ha_schema_load(invalid.as_ptr().cast(), &mut s), HaStatus::Utf8);

        let good = schema();
        assert_eq!(last_error(), "");
        let junk = CString::new("not a dictionary\n").unwrap();
        let mut lex = ptr::null_mut();
        let st = ha_lexicon_from_dictionary(good, junk.as_ptr(), ptr::null_mut(), &mut lex);
        assert_eq!(st, HaStatus::InvalidArgument);
        assert!(lex.is_null());
        ha_schema_free(good);
    }
}

#[test]
fn recognition_matches_core() {
    let s = schema();
    let lex = lexicon(s);
    let core_schema = AttributeSchema::default_schema();
    let entries = parse_dictionary(BUNDLED_DICTIONARY, &core_schema).entries;
    let core_lex = build_lexicon(&entries, &core_schema).unwrap();
    assert_eq!(unsafe { ha_lexicon_len(lex) }, entries.len());

    let mut out = [HaCandidate::default(); 5];
    let mut written = 0;
    for e in entries.iter().step_by(97) {
        let idx = entry_indices(e, &core_schema).unwrap();
        let st = unsafe {
            ha_recognize_indices(
                s,
                lex,
                idx.as_ptr(),
                idx.len(),
                ptr::null(),
                out.as_mut_ptr(),
                5,
                &mut written,
            )
        };
        assert_eq!(st, HaStatus::Ok, "{}", last_error());
        assert_eq!(written, 5);
        assert_eq!(out[0].distance, 0);
        assert!(out.windows(2).all(|w| w[0].distance <= w[1].distance));
        let hit = out.iter().take_while(|c| c.distance == 0).any(|c| c.label == e.label.0);
        assert!(hit);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let probs: Vec<f64> = (0..core_schema.dim()).map(|_| rng.gen()).collect();
        let sets = (0..core_schema.len())
            .map(|i| SetPrediction::Probs(probs[core_schema.span(i)].to_vec()))
            .collect();
        let q = argmax_onehot(&PredictionSet::from_sets(sets), &core_schema).unwrap();
        let want = recognize(&q, &core_lex, 3).unwrap();
        let st = unsafe {
            ha_recognize_probs(
                s,
                lex,
                probs.as_ptr(),
                probs.len(),
                ptr::null(),
                out.as_mut_ptr(),
                3,
                &mut written,
            )
        };
        assert_eq!(st, HaStatus::Ok);
        assert_eq!(written, 3);
        for (c, w) in out.iter().zip(&want) {
            assert_eq!((c.label, c.distance), (w.label.0, w.distance));
        }
    }
    unsafe {
        ha_lexicon_free(lex);
        ha_schema_free(s);
    }
}

#[test]
fn recognition_arguments() {
    let s = schema();
    let lex = lexicon(s);
    let core_schema = AttributeSchema::default_schema();
    let e = &parse_dictionary(BUNDLED_DICTIONARY, &core_schema).entries[10];
    let idx = entry_indices(e, &core_schema).unwrap();
    let mut out = [HaCandidate::default(); 4];
    let mut n = 0;
    unsafe {
        let groups = CString::new("cj,zm").unwrap();
        let st = ha_recognize_indices(
            s,
            lex,
            idx.as_ptr(),
            idx.len(),
            groups.as_ptr(),
            out.as_mut_ptr(),
            4,
            &mut n,
        );
        assert_eq!(st, HaStatus::Ok, "{}", last_error());
        assert_eq!(out[0].distance, 0);

        let bad = CString::new("cj,nope").unwrap();
        let st = ha_recognize_indices(
            s,
            lex,
            idx.as_ptr(),
            idx.len(),
            bad.as_ptr(),
            out.as_mut_ptr(),
            4,
            &mut n,
        );
        assert_eq!(st, HaStatus::InvalidArgument);

        let st = ha_recognize_indices(
            s,
            lex,
            idx.as_ptr(),
            idx.len() - 1,
            ptr::null(),
            out.as_mut_ptr(),
            4,
            &mut n,
        );
        assert_eq!(st, HaStatus::InvalidArgument);
        let st = ha_recognize_indices(
            s,
            lex,
            idx.as_ptr(),
            idx.len(),
            ptr::null(),
            out.as_mut_ptr(),
            0,
            &mut n,
        );
        assert_eq!(st, HaStatus::BufferTooSmall);
        let st = ha_recognize_indices(
            s,
            ptr::null(),
            idx.as_ptr(),
            idx.len(),
            ptr::null(),
            out.as_mut_ptr(),
            4,
            &mut n,
        );
        assert_eq!(st, HaStatus::NullPointer);

        let mut far = idx.clone();
        far[0] = (far[0] + 1) % core_schema.sets()[0].len();
        let mut d = u32::MAX;
        assert_eq!(
            ha_hamming_indices(s, idx.as_ptr(), idx.as_ptr(), idx.len(), &mut d),
            HaStatus::Ok
        );
        assert_eq!(d, 0);
        assert_eq!(
            ha_hamming_indices(s, idx.as_ptr(), far.as_ptr(), idx.len(), &mut d),
            HaStatus::Ok
        );
        assert_eq!(d, 2);

        ha_lexicon_free(lex);
        ha_schema_free(s);
    }
}

#[test]
fn lexicon_text_round_trip() {
    let core_schema = AttributeSchema::default_schema();
    let entries = parse_dictionary(BUNDLED_DICTIONARY, &core_schema).entries;
    let text = CString::new(build_lexicon(&entries[..100], &core_schema).unwrap().to_text()).unwrap();
    let mut lex = ptr::null_mut();
    unsafe {
        assert_eq!(ha_lexicon_load(text.as_ptr(), &mut lex), HaStatus::Ok);
        assert_eq!(ha_lexicon_len(lex), 100);
        ha_lexicon_free(lex);
        let junk = CString::new("garbage").unwrap();
        assert_eq!(ha_lexicon_load(junk.as_ptr(), &mut lex), HaStatus::InvalidArgument);
    }
}

#[test]
fn segmentation_matches_core() {
    let page = generate_page(&PageSpec::default(), 0.5, &mut ChaCha8Rng::seed_from_u64(1));
    let img = &page.image;
    let want = segment_page(img, &SegConfig::default()).unwrap();

    let mut seg = ptr::null_mut();
    unsafe {
        let st = ha_segment(
            img.pixels().as_ptr(),
            img.width(),
            img.height(),
            false,
            ptr::null(),
            &mut seg,
        );
        assert_eq!(st, HaStatus::Ok, "{}", last_error());
        assert_eq!(ha_segmentation_skew(seg), want.skew_angle);
        assert_eq!(ha_segmentation_line_count(seg), want.lines.len());
        let n = ha_segmentation_box_count(seg);
        assert_eq!(n, want.boxes.len());

        let mut boxes = vec![HaBox::default(); n];
        assert_eq!(
            ha_segmentation_boxes(seg, boxes.as_mut_ptr(), n - 1),
            HaStatus::BufferTooSmall
        );
        assert_eq!(ha_segmentation_boxes(seg, boxes.as_mut_ptr(), n), HaStatus::Ok);
        for (b, w) in boxes.iter().zip(&want.boxes) {
            assert_eq!(
                (b.x, b.y, b.w, b.h, b.line),
                (w.x as u32, w.y as u32, w.w as u32, w.h as u32, w.line as u32)
            );
        }
        ha_segmentation_free(seg);

        let cfg = CString::new("line_threshold=-1\n").unwrap();
        let st = ha_segment(
            img.pixels().as_ptr(),
            img.width(),
            img.height(),
            false,
            cfg.as_ptr(),
            &mut seg,
        );
        assert_eq!(st, HaStatus::InvalidArgument);
        let st = ha_segment(img.pixels().as_ptr(), 0, img.height(), false, ptr::null(), &mut seg);
        assert_eq!(st, HaStatus::InvalidArgument);
        let st = ha_segment(
            img.pixels().as_ptr(),
            img.width(),
            img.height(),
            true,
            ptr::null(),
            &mut seg,
        );
        assert_eq!(st, HaStatus::InvalidArgument);
    }
}

#[test]
fn header_compiles_as_c_and_cxx() {
    let dir = tempfile_dir();
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"hanzi_attr.h\"\n\
         int main(void) {\n\
           HaSchema *s = 0;\n\
           HaCandidate c[1];\n\
           size_t n = 0;\n\
           if (ha_schema_default(&s) != HA_STATUS_OK) return 1;\n\
           (void)ha_recognize_indices(s, 0, 0, 0, 0, c, 1, &n);\n\
           ha_schema_free(s);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    for (cc, flags) in [("cc", &["-std=c99"][..]), ("c++", &["-x", "c++", "-std=c++11"][..])] {
        let out = Command::new(cc)
            .args(flags)
            .args(["-Wall", "-Werror", "-fsyntax-only", "-I", header])
            .arg(&src)
            .output()
            .unwrap_or_else(|e| panic!("{cc}: {e}"));
        assert!(out.status.success(), "{cc}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("header");
    std::fs::create_dir_all(&d).unwrap();
    d
}
