package shop.catalog;

/* Inventory catalog. */
public class Catalog {
    private final CatalogEntry[] entries;  // CatalogEntry must survive a rename

    public Catalog(int capacity) {
        entries = new CatalogEntry[capacity];
    }

    public CatalogEntry lookup(int index) {
        return entries[index];  // bounds unchecked by design
    }
}
