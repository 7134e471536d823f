pub mod bench;
pub mod cli;
pub mod elbow;
pub mod entropy;
pub mod error;
pub mod ingest;
pub mod kmeans;
pub mod pixel_model;
pub mod seeding;
