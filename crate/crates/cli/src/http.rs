//! HTTP chat transport: POST {base_url}/chat/completions with a bearer
//! token from the configured environment variable.

use tactics_core::gateway::{ChatRequest, ChatTransport, GatewayConfig, TransportFailure};

pub struct HttpTransport {
    client: reqwest::blocking::Client,
    url: String,
    api_key: String,
}

impl HttpTransport {
    pub fn new(config: &GatewayConfig) -> Result<HttpTransport, String> {
        let api_key = std::env::var(&config.api_key_env).map_err(|_| {
            format!("environment variable {} is not set (API key)", config.api_key_env)
        })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs_f64(config.timeout))
            .build()
            .map_err(|e| format!("failed to build HTTP client: {e}"))?;
        let url = format!("{}/chat/completions", config.base_url.trim_end_matches('/'));
        Ok(HttpTransport { client, url, api_key })
    }
}

impl ChatTransport for HttpTransport {
    fn send(&self, request: &ChatRequest) -> Result<String, TransportFailure> {
        let response = self
            .client
            .post(&self.url)
            .bearer_auth(&self.api_key)
            .json(request)
            .send()
            .map_err(|e| TransportFailure::new(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Err(TransportFailure {
                message: format!("{status}: {}", body.chars().take(500).collect::<String>()),
                status: Some(status.as_u16()),
            });
        }
        let body: serde_json::Value =
            response.json().map_err(|e| TransportFailure::new(e.to_string()))?;
        body["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| TransportFailure::new("response missing choices[0].message.content"))
    }
}
