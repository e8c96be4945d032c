//! Abelian embeddings: relation lattices, normal forms and witnesses.

mod embedding;
mod matrix;

pub use embedding::{
    bipartition_embedding_witness, check_marginal_condition, column_index, has_z_embedding, relation_matrix,
    satisfies_relations, universal_embedding, verify_witness, AbelianGroupPresentation, EmbeddingWitness,
    MarginalReport, UniversalEmbedding,
};
pub use matrix::{hermite_normal_form, lattice_membership, smith_normal_form, IntegerMatrix, SnfDecomposition};
