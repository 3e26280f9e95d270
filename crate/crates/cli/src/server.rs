use std::net::SocketAddr;

use axum::body::Bytes;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::api;
use crate::error::{CliError, Result};

impl IntoResponse for CliError {
    fn into_response(self) -> Response {
        let status = match self {
            CliError::Io { .. } | CliError::Csv(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let body = serde_json::json!({ "error": self.code(), "message": self.to_string() });
        (status, axum::Json(body)).into_response()
    }
}

// Bounds, sweeps and simulations can be CPU heavy; keep them off the
// async workers.
async fn run<Req, Resp, F>(body: Bytes, f: F) -> Result<Response>
where
    Req: DeserializeOwned + Send + 'static,
    Resp: Serialize,
    F: FnOnce(&Req) -> Result<Resp> + Send + 'static,
    Resp: Send + 'static,
{
    let json = tokio::task::spawn_blocking(move || {
        let req: Req = api::parse(&body)?;
        api::to_json(&f(&req)?)
    })
    .await
    .map_err(|e| CliError::Usage(format!("worker failed: {e}")))??;
    Ok(([(header::CONTENT_TYPE, "application/json")], json).into_response())
}

pub fn router() -> Router {
    Router::new()
        .route(
            "/api/bounds",
            post(|b: Bytes| run::<api::BoundsRequest, _, _>(b, api::bounds)),
        )
        .route(
            "/api/proxy",
            post(|b: Bytes| run::<api::ProxyRequest, _, _>(b, api::proxy)),
        )
        .route(
            "/api/sweep",
            post(|b: Bytes| run::<api::SweepRequest, _, _>(b, api::sweep_grid)),
        )
        .route(
            "/api/social",
            post(|b: Bytes| run::<api::SocialRequest, _, _>(b, api::social)),
        )
        .route(
            "/api/simulate",
            post(|b: Bytes| run::<api::SimulateRequest, _, _>(b, api::run_simulation)),
        )
}

pub async fn serve(addr: SocketAddr) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| CliError::io(addr.to_string(), e))?;
    eprintln!("listening on http://{}", addr);
    axum::serve(listener, router())
        .await
        .map_err(|e| CliError::io(addr.to_string(), e))
}
