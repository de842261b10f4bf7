use std::fs;
use std::path::Path;

use flowcnn::checkpoint;
use flowcnn::clipio::{frame_name, load_clip, to_byte, write_frame_dir, write_vclip, VCLIP_MAGIC};
use flowcnn::flowcnn_core::model::build_model;
use flowcnn::flowcnn_core::video::Clip;
use flowcnn::flowcnn_core::Error as CoreError;
use flowcnn::ppm::{self, Image};
use flowcnn::Error;
use proptest::prelude::*;

fn clip_strategy() -> impl Strategy<Value = Clip> {
    (2usize..5, 1usize..7, 1usize..7).prop_flat_map(|(t, h, w)| {
        proptest::collection::vec(0.0f32..=1.0, t * h * w * 3).prop_map(move |data| Clip::new(t, h, w, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ppm_sequence_round_trip(clip in clip_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        write_frame_dir(&clip, dir.path()).unwrap();
        let back = load_clip(dir.path()).unwrap();
        prop_assert_eq!((back.frames(), back.height(), back.width()), (clip.frames(), clip.height(), clip.width()));
        for (&a, &b) in clip.data().iter().zip(back.data()) {
            prop_assert!((a - b).abs() <= 0.5 / 255.0 + 1e-6);
            prop_assert_eq!(b, to_byte(a) as f32 / 255.0);
        }
    }

    #[test]
    fn vclip_round_trip_is_bit_exact(clip in clip_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.vclip");
        write_vclip(&clip, &path).unwrap();
        let back = load_clip(&path).unwrap();
        prop_assert!(clip.data().iter().zip(back.data()).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(back, clip);
    }

    #[test]
    fn checkpoint_round_trip(n in 1usize..4, seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.vcnn");
        let params = build_model(n, [3, 7, 32, 32], seed).unwrap();
        checkpoint::save(&params, &path).unwrap();
        prop_assert_eq!(checkpoint::load(&path).unwrap(), params);
    }
}

fn black_frame(dir: &Path, index: usize, w: usize, h: usize) {
    ppm::write(&dir.join(frame_name(index)), &Image::new(w, h, vec![0; w * h * 3]).unwrap()).unwrap();
}

#[test]
fn empty_directory_has_no_frames() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("notes.txt"), "x").unwrap();
    assert!(matches!(load_clip(dir.path()), Err(Error::MissingFrames(_))));
}

#[test]
fn single_frame_violates_clip_invariant() {
    let dir = tempfile::tempdir().unwrap();
    black_frame(dir.path(), 0, 2, 2);
    assert!(matches!(load_clip(dir.path()), Err(Error::Core(CoreError::InvalidClip(_)))));
}

#[test]
fn frames_of_different_sizes() {
    let dir = tempfile::tempdir().unwrap();
    black_frame(dir.path(), 0, 2, 2);
    black_frame(dir.path(), 1, 3, 2);
    assert!(matches!(load_clip(dir.path()), Err(Error::InconsistentDims(_))));
}

#[test]
fn numbering_gap_is_malformed() {
    let dir = tempfile::tempdir().unwrap();
    black_frame(dir.path(), 0, 2, 2);
    black_frame(dir.path(), 2, 2, 2);
    assert!(matches!(load_clip(dir.path()), Err(Error::MalformedFile { .. })));
}

#[test]
fn frames_load_in_index_order() {
    let dir = tempfile::tempdir().unwrap();
    for (i, v) in [(1usize, 200u8), (0, 10), (2, 255)] {
        ppm::write(&dir.path().join(frame_name(i)), &Image::new(1, 1, vec![v; 3]).unwrap()).unwrap();
    }
    let clip = load_clip(dir.path()).unwrap();
    assert_eq!(clip.pixel(0, 0, 0), [10.0 / 255.0; 3]);
    assert_eq!(clip.pixel(1, 0, 0), [200.0 / 255.0; 3]);
    assert_eq!(clip.pixel(2, 0, 0), [1.0; 3]);
}

#[test]
fn malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad_ppm = dir.path().join("frames");
    fs::create_dir(&bad_ppm).unwrap();
    fs::write(bad_ppm.join(frame_name(0)), b"P6\n1 1\n15\n\0\0\0").unwrap();
    fs::write(bad_ppm.join(frame_name(1)), b"P6\n1 1\n15\n\0\0\0").unwrap();
    assert!(matches!(load_clip(&bad_ppm), Err(Error::MalformedFile { .. })));

    let bad_vclip = dir.path().join("x.vclip");
    fs::write(&bad_vclip, b"VCLP2\n").unwrap();
    assert!(matches!(load_clip(&bad_vclip), Err(Error::MalformedFile { .. })));
    assert!(matches!(load_clip(&dir.path().join("absent.vclip")), Err(Error::Io { .. })));
}

#[test]
fn vclip_out_of_range_values_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.vclip");
    let mut bytes = VCLIP_MAGIC.to_vec();
    for d in [2u32, 1, 1, 3] {
        bytes.extend_from_slice(&d.to_le_bytes());
    }
    for v in [0.0f32, 0.5, 1.5, 0.0, 0.0, 0.0] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&path, bytes).unwrap();
    assert!(matches!(load_clip(&path), Err(Error::Core(CoreError::InvalidClip(_)))));
}

#[test]
fn hockey_sized_vclip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hockey.vclip");
    let (t, h, w) = (40, 144, 180);
    let mut bytes = VCLIP_MAGIC.to_vec();
    for d in [t, h, w, 3u32] {
        bytes.extend_from_slice(&d.to_le_bytes());
    }
    for i in 0..(t * h * w * 3) {
        bytes.extend_from_slice(&((i % 7) as f32 / 6.0).to_le_bytes());
    }
    fs::write(&path, bytes).unwrap();
    let clip = load_clip(&path).unwrap();
    assert_eq!((clip.frames(), clip.height(), clip.width()), (40, 144, 180));
    assert_eq!(clip.data()[8], 1.0 / 6.0);
}
