use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;

use morphsynth::fixtures;
use morphsynth_app::store::ProblemStore;
use morphsynth_app::AppError;

#[test]
fn persists_one_file_per_problem() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProblemStore::open(dir.path()).unwrap();
    store.create(Some("one"), fixtures::example1()).unwrap();
    let two = store.create(None, fixtures::example2()).unwrap();
    store.update(&two.id, 1, fixtures::example3()).unwrap();

    let mut files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    assert_eq!(files, ["one.json", "p1.json"]);

    let reopened = ProblemStore::open(dir.path()).unwrap();
    assert_eq!(reopened.list(), store.list());
    assert_eq!(reopened.get("p1").unwrap().revision, 2);
    assert_eq!(reopened.get("p1").unwrap().document, fixtures::example3());
}

#[test]
fn open_rejects_corrupt_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{").unwrap();
    assert!(matches!(ProblemStore::open(dir.path()), Err(AppError::Io(_))));
}

#[test]
fn stale_update_leaves_state_alone() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProblemStore::open(dir.path()).unwrap();
    store.create(Some("x"), fixtures::example1()).unwrap();
    let err = store.update("x", 0, fixtures::example2()).unwrap_err();
    assert!(matches!(err, AppError::Conflict { current: 1, given: 0 }));
    assert_eq!(store.get("x").unwrap().document, fixtures::example1());
    assert!(matches!(store.update("y", 1, fixtures::example2()), Err(AppError::NotFound(_))));
}

/// Readers racing a writer always see a document consistent with the
/// revision they were handed.
#[test]
fn readers_see_whole_revisions() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(ProblemStore::open(dir.path()).unwrap());
    let tagged = |rev: u64| {
        let mut doc = fixtures::example1();
        doc.description = Some(format!("revision {rev}"));
        doc
    };
    store.create(Some("shared"), tagged(1)).unwrap();
    let done = Arc::new(AtomicBool::new(false));

    let readers: Vec<_> = (0..4)
        .map(|_| {
            let (store, done) = (store.clone(), done.clone());
            thread::spawn(move || {
                let mut seen = 0;
                let mut last = 0;
                while !done.load(Ordering::Relaxed) || seen == 0 {
                    let snap = store.get("shared").unwrap();
                    assert_eq!(snap.document.description.as_deref(), Some(format!("revision {}", snap.revision).as_str()));
                    assert!(snap.revision >= last, "revisions never go backwards");
                    last = snap.revision;
                    seen += 1;
                }
                seen
            })
        })
        .collect();

    for rev in 1..50 {
        store.update("shared", rev, tagged(rev + 1)).unwrap();
    }
    done.store(true, Ordering::Relaxed);
    for r in readers {
        assert!(r.join().unwrap() > 0);
    }
    assert_eq!(store.get("shared").unwrap().revision, 50);
}
