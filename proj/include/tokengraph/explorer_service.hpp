#pragma once

#include <tokengraph/analytics.hpp>
#include <tokengraph/enrichment.hpp>
#include <tokengraph/graph_io.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace tokengraph
{

// Immutable, annotated pair of graphs with the reports the API serves.
class GraphSnapshot
{
public:
    struct ModeView
    {
        TokenGraph graph;
        ComponentReport components; // weak
        std::map<Address, std::size_t> membership;
        std::map<Address, DegreeRecord> degrees;
        std::map<Address, std::vector<Address>> neighbours; // undirected
        StrongComponentReport strong;
    };

    static std::shared_ptr<GraphSnapshot const>
    from_graphs(TokenGraph unfiltered, TokenGraph filtered,
                MetadataMap metadata = {}, LabelMap labels = {});

    static std::shared_ptr<GraphSnapshot const>
    from_meta_events(std::vector<TokenisingMetaEvent> const &events,
                     MetadataMap metadata = {}, LabelMap labels = {});

    ModeView const &view(GraphMode mode) const
    {
        return mode == GraphMode::filtered ? filtered_ : unfiltered_;
    }
    MetadataMap const &metadata() const { return metadata_; }
    // Scenario labels overlaid with metadata symbols.
    LabelMap const &labels() const { return labels_; }
    // Content hash of both graphs and the metadata.
    std::string const &etag() const { return etag_; }

private:
    GraphSnapshot() = default;

    ModeView unfiltered_;
    ModeView filtered_;
    MetadataMap metadata_;
    LabelMap labels_;
    std::string etag_;
};

struct HttpResponse
{
    int status = 200;
    std::string body;
    std::string etag;
    std::string content_type = "application/json";
};

using QueryParams = std::map<std::string, std::string>;

// Request handling without any socket; the HTTP binding forwards to it.
class ExplorerService
{
public:
    static constexpr std::size_t max_depth = 4;
    static constexpr std::size_t neighbourhood_cap = 2000;

    explicit ExplorerService(std::shared_ptr<GraphSnapshot const> snapshot);

    HttpResponse handle(std::string_view path, QueryParams const &params) const;

    GraphSnapshot const &snapshot() const { return *snapshot_; }

private:
    std::shared_ptr<GraphSnapshot const> snapshot_;
};

class ExplorerServer
{
public:
    // Without a static directory "/" serves a small built-in index page.
    ExplorerServer(ExplorerService service,
                   std::optional<std::string> static_dir = std::nullopt);
    ~ExplorerServer();

    ExplorerServer(ExplorerServer const &) = delete;
    ExplorerServer &operator=(ExplorerServer const &) = delete;

    // Port 0 binds any free port. Returns the bound port.
    int bind(std::string const &host, int port);
    // Blocks until stop().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// "host:port", port defaulting to 8080.
std::pair<std::string, int> parse_bind_address(std::string const &text);

} // namespace tokengraph
