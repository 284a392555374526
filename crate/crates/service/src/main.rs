use anyhow::Context;
use cnlasp_service::{app, AppState, BIND_ENV, DEFAULT_BIND};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let bind = std::env::var(BIND_ENV).unwrap_or_else(|_| DEFAULT_BIND.to_owned());
    let listener = tokio::net::TcpListener::bind(&bind)
        .await
        .with_context(|| format!("binding {bind}"))?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app(AppState::default())).await?;
    Ok(())
}
