//! Dense oracles and experiments: generalized eigenvalues of matrix pencils,
//! congestion-dilation certificates and the truss-path scaling study.

mod certificate;
mod path_lemma;
mod pencil;

pub use certificate::{
    congestion_dilation_bound, fretsaw_certificate, CertificateTerm, CongestionCertificate,
};
pub use path_lemma::{path_lemma_experiment, PathLemmaRow, PathLemmaTable};
pub use pencil::{
    null_space_dim, pencil_eigs, pencil_eigs_dense, schur_complement_dense, symmetric_eigen,
    PencilSpectrum,
    DENSE_LIMIT, NULL_THRESHOLD,
};
