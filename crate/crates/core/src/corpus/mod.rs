//! Transcript data model, IRP taxonomy and corpus I/O.

mod dialogue;
mod io;
mod taxonomy;
mod traits;

pub use dialogue::{AgentMeta, Dialogue, DialogueError, DialogueMeta, Role, RoleMap, Segment, Source, Turn};
pub use io::{
    dialogue_to_line, load_corpus, load_corpus_report, parse_dialogue_line, parse_unvalidated, read_corpus,
    write_corpus, write_corpus_to, CorpusError, LoadReport, RecordError,
};
pub use taxonomy::{category_of, IrpCategory, IrpStrategy, UnknownStrategy};
pub use traits::{
    HumanScores, InvalidHumanScore, InvalidTraitLevel, PersonalityProfile, Polarity, Trait, TraitLevel, TraitProfile,
    TraitScale,
};
