//! Shared command plumbing: client construction, artifact writing, and
//! the resolved-config echo.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use curator_core::llmclient::{DiskCache, HttpBackend, LlmClient, ScriptedBackend};

use crate::CommonArgs;

/// Build the completion client from the --client selector.
pub fn build_client(common: &CommonArgs) -> Result<LlmClient> {
    let backend: Arc<dyn curator_core::llmclient::CompletionBackend> =
        if let Some(script) = common.client.strip_prefix("mock:") {
            Arc::new(
                ScriptedBackend::from_script_file(script)
                    .with_context(|| format!("loading mock script {script}"))?,
            )
        } else if common.client == "real" {
            Arc::new(HttpBackend::from_env().context("configuring the real backend")?)
        } else {
            anyhow::bail!(
                "unknown client '{}'; expected \"real\" or \"mock:<script>\"",
                common.client
            );
        };
    let mut client = LlmClient::new(backend);
    if let Some(dir) = &common.cache_dir {
        client = client.with_cache(DiskCache::new(dir)?);
    }
    Ok(client)
}

/// Create the artifact directory and record the resolved configuration.
pub fn prepare_out_dir(
    common: &CommonArgs,
    subcommand: &str,
    args_json: serde_json::Value,
) -> Result<PathBuf> {
    let dir = common.out.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let config = serde_json::json!({
        "subcommand": subcommand,
        "seed": common.seed,
        "client": common.client,
        "cache_dir": common.cache_dir,
        "workers": common.workers,
        "args": args_json,
    });
    write_artifact(
        &dir,
        "run_config.json",
        &(serde_json::to_string_pretty(&config)? + "\n"),
    )?;
    Ok(dir)
}

pub fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Read JSONL records into owned lines, skipping blanks.
pub fn read_jsonl_values(path: &Path) -> Result<Vec<serde_json::Value>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line)
            .with_context(|| format!("{}:{}", path.display(), idx + 1))?;
        values.push(value);
    }
    Ok(values)
}
