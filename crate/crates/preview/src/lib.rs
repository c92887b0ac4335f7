//! HTTP facade for the interactive designer: schema, preview renders and
//! color estimates from photographs. Handlers hold no mutable state.

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use schemars::JsonSchema;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use xylem::grid::CellHashSeed;
use xylem::wood::{estimate_color_params, preset, presets, ColorEstimate, WoodParams, DEFAULT_PRESET, SCHEMA_VERSION};
use xylem::FieldError;
use xylem_render::raster::{decode_linear, srgb8};
use xylem_render::{Quality, RenderError, Slab, SlabScene};

pub const CONTENT_HASH: &str = "x-content-hash";
pub const PREVIEW_QUALITY: &str = "x-preview-quality";

const MAX_UPLOAD: usize = 64 << 20;

#[derive(Clone, Debug, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RenderRequest {
    pub params: WoodParams,
    #[serde(default)]
    pub scene: SlabScene,
    #[serde(default)]
    pub preview_quality: Quality,
    /// Replaces `params.seed` when present.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ServiceConfig {
    /// Seed for requests that carry none of their own.
    pub seed: Option<u64>,
}

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/schema", get(schema))
        .route("/render", post(render))
        .route("/estimate", post(estimate))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD))
        .with_state(config)
}

/// Serves `router` until the process is stopped.
pub async fn serve(host: &str, port: u16, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    axum::serve(listener, router(config)).await
}

fn error_body(status: StatusCode, errors: &[FieldError]) -> Response {
    (status, Json(json!({ "errors": errors }))).into_response()
}

fn prefixed(prefix: &str, errors: Vec<FieldError>) -> Vec<FieldError> {
    errors
        .into_iter()
        .map(|e| FieldError { path: if e.path.starts_with("scene") { e.path } else { format!("{prefix}.{}", e.path) }, ..e })
        .collect()
}

pub fn schema_document() -> Value {
    let named: serde_json::Map<_, _> = presets().into_iter().map(|(n, p)| (n.to_owned(), json!(p))).collect();
    json!({
        "version": SCHEMA_VERSION,
        "schema": schemars::schema_for!(WoodParams),
        "scene_schema": schemars::schema_for!(SlabScene),
        "request_schema": schemars::schema_for!(RenderRequest),
        "defaults": preset(DEFAULT_PRESET),
        "default_preset": DEFAULT_PRESET,
        "presets": named,
    })
}

async fn schema() -> Json<Value> {
    Json(schema_document())
}

pub fn parse_request(body: &[u8]) -> Result<RenderRequest, Vec<FieldError>> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| vec![FieldError::new(e.path().to_string(), e.inner().to_string())])
}

/// The PNG preview of a request, with its quality tier.
pub fn render_png(mut request: RenderRequest, config: ServiceConfig) -> Result<(Vec<u8>, Quality), RenderError> {
    if let Some(seed) = request.seed.or(config.seed) {
        request.params.seed = CellHashSeed(seed);
    }
    let errors = request.params.validation_errors();
    if !errors.is_empty() {
        return Err(RenderError::Invalid(errors));
    }
    let (scene, params) = request.preview_quality.apply(&request.scene, &request.params);
    let png = Slab::new(&scene, &params)?.render(None)?.png_bytes()?;
    Ok((png, request.preview_quality))
}

async fn render(State(config): State<ServiceConfig>, body: Bytes) -> Response {
    let request = match parse_request(&body) {
        Ok(r) => r,
        Err(errors) => return error_body(StatusCode::BAD_REQUEST, &errors),
    };
    let result = tokio::task::spawn_blocking(move || render_png(request, config)).await;
    match result {
        Ok(Ok((png, quality))) => {
            let mut headers = HeaderMap::new();
            headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("image/png"));
            let hash = hex::encode(Sha256::digest(&png));
            headers.insert(CONTENT_HASH, HeaderValue::from_str(&hash).expect("hex is a valid header"));
            headers.insert(PREVIEW_QUALITY, HeaderValue::from_static(quality.as_str()));
            (headers, png).into_response()
        }
        Ok(Err(RenderError::Invalid(errors))) => error_body(StatusCode::BAD_REQUEST, &prefixed("params", errors)),
        Ok(Err(RenderError::Degenerate(errors))) => error_body(StatusCode::UNPROCESSABLE_ENTITY, &errors),
        Ok(Err(e)) => error_body(StatusCode::INTERNAL_SERVER_ERROR, &[FieldError::new("", e.to_string())]),
        Err(e) => error_body(StatusCode::INTERNAL_SERVER_ERROR, &[FieldError::new("", e.to_string())]),
    }
}

/// Estimate plus the two plateau colors as 8-bit sRGB.
pub fn estimate_document(e: &ColorEstimate) -> Value {
    let mut doc = json!(e);
    doc["earlywood_srgb"] = json!(e.earlywood.map(srgb8));
    doc["latewood_srgb"] = json!(e.latewood.map(srgb8));
    doc
}

async fn estimate(body: Bytes) -> Response {
    let pixels = match decode_linear(&body) {
        Ok(p) => p,
        Err(e) => return error_body(StatusCode::UNSUPPORTED_MEDIA_TYPE, &[FieldError::new("image", e.to_string())]),
    };
    match estimate_color_params(&pixels) {
        Ok(e) => Json(estimate_document(&e)).into_response(),
        Err(e) => error_body(StatusCode::UNPROCESSABLE_ENTITY, &e.field_errors()),
    }
}
